#ifndef LIST_H
#define LIST_H

#include <stddef.h>

typedef struct node {
    int value;
    struct node *next;
} node_t;

typedef struct {
    node_t *head;
    size_t size;
} list_t;

void list_push(list_t *l, int v);
int list_sum(const list_t *l);

#endif
