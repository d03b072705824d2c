package com.example.render;

import java.util.ArrayList;
import java.util.List;

/**
 * Renders tiles onto a canvas. The word "ignoredInComment" must not leak.
 */
@SuppressWarnings("unchecked")
public class TileRenderer<T extends Tile> implements Renderer {
    private static final int MAX_TILES = 0x7f;
    private final List<T> tiles = new ArrayList<>();
    private char separator = '\'';
    private String title = "ignoredInString";

    public TileRenderer(int capacity) {
        super();
        this.separator = ',';
    }

    @Override
    public void draw(Canvas canvas, double scale) {
        for (T tile : tiles) {
            if (tile.visible() && scale > 1.5e-3) {
                canvas.paint(tile, (int) (scale * MAX_TILES));
            }
        }
        var count = tiles.size();
        label:
        while (count-- > 0) {
            break label;
        }
        Runnable r = () -> canvas.flush();
        r.run();
    }

    enum Mode { FAST, EXACT }

    interface Tile {
        boolean visible();
    }
}
