#include <stdio.h>
#include <string.h>
#include "qtorus.h"

int main(void) {
    QtLocalSystem *sys = NULL;
    size_t ranks[3];
    if (qt_local_system_new(2, 1, NULL, 0, &sys) != QT_STATUS_OK) return 1;
    if (qt_cohomology_ranks(sys, ranks) != QT_STATUS_OK) return 2;
    qt_local_system_free(sys);
    if (ranks[0] != 1 || ranks[1] != 4 || ranks[2] != 1) return 3;

    int64_t c[1] = {1};
    QtLevel *level = NULL;
    if (qt_level_new(1, c, "1/4", &level) != QT_STATUS_OK) return 4;
    int64_t lambda[1] = {3};
    uint64_t num = 0, den = 0;
    if (qt_twist(level, lambda, 1, &num, &den) != QT_STATUS_OK) return 5;
    qt_level_free(level);
    if (num != 1 || den != 4) return 6;

    if (qt_level_new(1, c, "1/1", &level) != QT_STATUS_MALFORMED_FRACTION) return 7;
    if (strlen(qt_last_error_message()) == 0) return 8;
    printf("ok\n");
    return 0;
}
