#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wtda/classifier.hpp"
#include "wtda/persistence_image.hpp"
#include "wtda/wafer_sim.hpp"

namespace wtda {

// Minimal grayscale raster; plots are written as binary PGM with the
// underlying numbers in a CSV next to each image.
struct Canvas {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> gray;  // row-major, 255 = white

    Canvas(int w, int h, std::uint8_t fill = 255);
    void set(int x, int y, std::uint8_t v);
    void disk(int cx, int cy, int r, std::uint8_t v);
    void circle(int cx, int cy, int r, std::uint8_t v);
    void line(int x0, int y0, int x1, int y1, std::uint8_t v);
    void save_pgm(const std::string& path) const;
};

// each writes <stem>.pgm and <stem>.csv
void plot_wafer(const WaferMap& w, const std::string& stem);
void plot_diagram(const PersistenceDiagram& d, const std::string& stem);
void plot_pi(const PersistenceImage& img, const std::string& stem);
void plot_curves(const EvalReport& report, const std::string& stem);
void plot_confusion(const std::vector<std::vector<long>>& confusion, const std::string& stem);

}  // namespace wtda
