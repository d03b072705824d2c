#include <stdio.h>
#include "pixels.h"

#define CLAMP(x) ((x) < 0 ? 0 : (x))

/* ignoredInBlockComment */
typedef struct rgb_pixel {
    unsigned char red;
    unsigned char green;
    unsigned char blue;
} rgb_pixel_t;

static const char *greeting = "ignoredInString";

int blur_row(rgb_pixel_t *row, size_t width, int radius) {
    int total = 0;
    for (size_t i = 0; i < width; ++i) {
        total += CLAMP(row[i].red - radius); // ignoredInLineComment
    }
    if (total > 0) {
        goto done;
    }
done:
    return total + sizeof(rgb_pixel_t);
}
