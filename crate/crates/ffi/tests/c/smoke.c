#include <stdio.h>
#include <string.h>

#include "semipos.h"

int main(void) {
    SemiposMatrix *a = NULL;
    if (semipos_matrix_parse("1 -1\n-1 1\n", &a) != SEMIPOS_STATUS_OK) {
        return 10;
    }
    SemiposSpKind kind;
    char *vector = NULL;
    if (semipos_classify_sp(a, NULL, NULL, &kind, &vector) != SEMIPOS_STATUS_OK) {
        return 11;
    }
    printf("%s %s\n", kind == SEMIPOS_SP_KIND_SEMIPOSITIVE ? "sp" : "not-sp", vector);
    semipos_string_free(vector);
    semipos_matrix_free(a);

    SemiposMatrix *bad = NULL;
    SemiposStatus s = semipos_matrix_parse("1 2\n3\n", &bad);
    printf("status %d %s\n", (int)s, semipos_last_error());
    return bad == NULL ? 0 : 12;
}
