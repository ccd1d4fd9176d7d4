#include <stdio.h>
#include "list.h"

struct stats {
    int count;
};

static void report(struct stats s) {
    printf("%d\n", s.count);
}

int main(void) {
    list_t l = {0};
    for (int i = 0; i < 3; ++i) {
        list_push(&l, i);
    }
    struct stats s = { list_sum(&l) };
    report(s);
    return 0;
}
