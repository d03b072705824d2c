package com.example.swing;

import java.util.List;

public class MenuBar extends Panel {
    private MenuItem firstItem;
    private int menuWidth;

    public MenuBar(MenuItem firstItem) {
        this.firstItem = firstItem;
    }

    public void openMenu(int delta) {
        menuWidth += delta;
        firstItem.layoutMenu(menuWidth);
    }
}
