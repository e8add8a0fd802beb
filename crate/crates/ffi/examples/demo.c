#include <stdio.h>
#include <stdlib.h>

#include "mutable_rank_select.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        MrsStatus s_ = (call);                                             \
        if (s_ != MRS_STATUS_OK) {                                         \
            fprintf(stderr, "%s: %s\n", #call, mrs_status_message(s_));    \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    /* 01101101010101110, position 0 first */
    const char *text = "01101101010101110";
    uint64_t word = 0;
    for (int i = 0; text[i]; i++)
        if (text[i] == '1') word |= (uint64_t)1 << i;

    MrsBitmap *bm = NULL;
    CHECK(mrs_bitmap_from_words(&word, 1, 17, 256, MRS_INDEX_WIDE, &bm));

    uint64_t r, s;
    CHECK(mrs_bitmap_rank(bm, 7, &r));
    CHECK(mrs_bitmap_select(bm, 7, &s));
    printf("rank(7)=%llu select(7)=%llu\n", (unsigned long long)r, (unsigned long long)s);

    CHECK(mrs_bitmap_flip(bm, 3));
    CHECK(mrs_bitmap_flip(bm, 6));
    CHECK(mrs_bitmap_rank(bm, 7, &r));
    CHECK(mrs_bitmap_select(bm, 7, &s));
    printf("rank(7)=%llu select(7)=%llu\n", (unsigned long long)r, (unsigned long long)s);

    size_t size = 0;
    CHECK(mrs_bitmap_serialize(bm, NULL, 0, &size));
    uint8_t *buf = malloc(size);
    CHECK(mrs_bitmap_serialize(bm, buf, size, &size));
    MrsBitmap *copy = NULL;
    CHECK(mrs_bitmap_deserialize(buf, size, &copy));
    printf("copy: %llu of %llu bits set\n", (unsigned long long)mrs_bitmap_ones(copy),
           (unsigned long long)mrs_bitmap_len(copy));

    MrsStatus err = mrs_bitmap_select(copy, 100, &s);
    printf("select(100): %s\n", mrs_status_message(err));

    free(buf);
    mrs_bitmap_free(copy);
    mrs_bitmap_free(bm);
    return 0;
}
