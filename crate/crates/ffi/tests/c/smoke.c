#include <stdio.h>
#include <string.h>
#include "diffam.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "line %d: %s: %s\n", __LINE__, #cond, diffam_last_error_message()); return 1; } } while (0)

int main(void) {
    DiffamFamily *fam = NULL;
    DiffamCode *code = NULL;
    char *report = NULL;
    int32_t passed = 0;
    int64_t num = 0, den = 0;
    size_t order = 0, sets = 0;

    CHECK(diffam_family_from_json("{\"group\":{\"cyclic\":[19]},\"sets\":[[1,7,11],[4,6,9],[5,16,17]]}", &fam) == DIFFAM_OK);
    CHECK(diffam_family_shape(fam, &order, &sets) == DIFFAM_OK && order == 19 && sets == 3);
    CHECK(diffam_family_verify(fam, "edf", NULL, &passed, &report) == DIFFAM_OK && passed == 1);
    diffam_string_free(report);
    CHECK(diffam_code_from_family(fam, &code) == DIFFAM_OK);
    CHECK(diffam_code_weak_optimum(code, &num, &den) == DIFFAM_OK && num == 1 && den == 3);
    diffam_code_free(code);
    diffam_family_free(fam);

    CHECK(diffam_family_from_json("{\"group\":{\"cyclic\":[5]},\"sets\":[[1,2],[7]]}", &fam) == 20);
    CHECK(strlen(diffam_last_error_message()) > 0);
    printf("ok %s\n", diffam_version());
    return 0;
}
