package com.example.swing;

public class Registry {
    private int button;
    private int pixel;
    private int blur;
    private int caret;
}
