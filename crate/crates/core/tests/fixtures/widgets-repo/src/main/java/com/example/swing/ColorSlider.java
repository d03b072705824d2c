package com.example.swing;

import java.util.List;

public class ColorSlider extends SliderWidget {
    private Panel preview;
    private int hue;

    public ColorSlider(Panel preview) {
        this.preview = preview;
    }

    public void slideTo(int delta) {
        hue += delta;
        preview.repaintPanel(hue);
    }
}
