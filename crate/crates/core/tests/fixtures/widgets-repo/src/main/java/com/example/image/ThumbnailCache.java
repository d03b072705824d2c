package com.example.image;

import java.util.List;

public class ThumbnailCache extends Cache {
    private Image source;
    private int thumbWidth;

    public ThumbnailCache(Image source) {
        this.source = source;
    }

    public void thumbnailFor(int delta) {
        thumbWidth += delta;
        source.scaleImage(thumbWidth);
    }
}
