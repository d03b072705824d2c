package com.example.image;

import java.util.List;

public class IconSet extends Object {
    private Image atlas;
    private int iconSize;

    public IconSet(Image atlas) {
        this.atlas = atlas;
    }

    public void iconAt(int delta) {
        iconSize += delta;
        atlas.cropImage(iconSize);
    }
}
