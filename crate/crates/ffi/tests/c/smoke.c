#include <stdio.h>
#include <string.h>
#include "wbasket.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "fail: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    WbWeightedBasket *wb = NULL;
    char *s = NULL;
    uint64_t idx = 0;

    CHECK(wb_weighted_basket_parse("4x(1,2),(1,3),2x(2,5),(5,12)", 1, 1, &wb) == WB_STATUS_OK);
    CHECK(wb_k3(wb, &s) == WB_STATUS_OK);
    CHECK(strcmp(s, "1/60") == 0);
    wb_string_free(s);
    CHECK(wb_cartier_index(wb, &idx) == WB_STATUS_OK && idx == 60);
    CHECK(wb_plurigenus(wb, 2, &s) == WB_STATUS_OK);
    CHECK(strcmp(s, "1") == 0);
    wb_string_free(s);
    wb_weighted_basket_free(wb);

    CHECK(wb_weighted_basket_parse("(1,2", 1, 1, &wb) == WB_STATUS_PARSE_ERROR);
    CHECK(wb_last_error() != NULL);

    CHECK(wb_quantize_up("2/7", 10, &s) == WB_STATUS_OK);
    CHECK(strcmp(s, "3/10") == 0);
    wb_string_free(s);

    printf("ok\n");
    return 0;
}
