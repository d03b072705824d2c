package com.example.swing;

import java.util.List;

public class DialogWindow extends Window {
    private Button okButton;
    private int dialogHeight;

    public DialogWindow(Button okButton) {
        this.okButton = okButton;
    }

    public void showDialog(int delta) {
        dialogHeight += delta;
        okButton.click(dialogHeight);
    }
}
