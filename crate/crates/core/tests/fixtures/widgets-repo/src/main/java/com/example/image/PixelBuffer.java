package com.example.image;

import java.util.List;

public class PixelBuffer extends Buffer {
    private Bitmap target;
    private int stride;

    public PixelBuffer(Bitmap target) {
        this.target = target;
    }

    public void putPixel(int delta) {
        stride += delta;
        target.syncBitmap(stride);
    }
}
