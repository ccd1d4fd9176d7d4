#include <stdlib.h>
#include "list.h"

static node_t *make_node(int v) {
    node_t *n = malloc(sizeof *n);
    n->value = v;
    n->next = NULL;
    return n;
}

void list_push(list_t *l, int v) {
    node_t *n = make_node(v);
    n->next = l->head;
    l->head = n;
    l->size++;
}

int list_sum(const list_t *l) {
    int total = 0;
    for (node_t *it = l->head; it; it = it->next) {
        total += it->value;
    }
    return total;
}
