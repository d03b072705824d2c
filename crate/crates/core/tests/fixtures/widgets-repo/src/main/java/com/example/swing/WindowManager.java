package com.example.swing;

import java.util.List;

public class WindowManager extends Object {
    private Window activeWindow;
    private int windowCount;

    public WindowManager(Window activeWindow) {
        this.activeWindow = activeWindow;
    }

    public void focusWindow(int delta) {
        windowCount += delta;
        activeWindow.raiseWindow(windowCount);
    }
}
