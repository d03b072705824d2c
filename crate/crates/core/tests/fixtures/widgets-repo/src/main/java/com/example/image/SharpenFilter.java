package com.example.image;

import java.util.List;

public class SharpenFilter extends ConvolutionFilter {
    private Kernel kernel;
    private int amount;

    public SharpenFilter(Kernel kernel) {
        this.kernel = kernel;
    }

    public void sharpen(int delta) {
        amount += delta;
        kernel.convolveKernel(amount);
    }
}
