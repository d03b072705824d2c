package com.example.swing;

import java.util.List;

public class ToolbarButton extends BaseWidget {
    private Panel panel;
    private int clickCount;

    public ToolbarButton(Panel panel) {
        this.panel = panel;
    }

    public void onClick(int delta) {
        clickCount += delta;
        panel.repaintWidget(clickCount);
    }
}
