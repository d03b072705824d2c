package com.example.swing;

public class PixelTest {
    private Pixel pixel;
    private Raster raster;
    private Bitmap bitmap;
    private Image image;
}
