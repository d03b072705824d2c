package com.example.swing;

import java.util.List;

public class PanelLayout extends LayoutManager {
    private Panel panel;
    private int gap;

    public PanelLayout(Panel panel) {
        this.panel = panel;
    }

    public void layoutPanel(int delta) {
        gap += delta;
        panel.resizeWidget(gap);
    }
}
