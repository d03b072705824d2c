package com.example.toy;

/** A button that shows a picture. */
public class ImageButton extends Widget {
    private int pixel;

    public void drawButton() {
        // nothing to draw yet
    }
}
