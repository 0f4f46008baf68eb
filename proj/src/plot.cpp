#include "wtda/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wtda/io.hpp"

namespace wtda {

Canvas::Canvas(int w, int h, std::uint8_t fill)
    : width(w), height(h), gray(std::size_t(w) * h, fill) {}

void Canvas::set(int x, int y, std::uint8_t v) {
    if (x >= 0 && x < width && y >= 0 && y < height) gray[std::size_t(y) * width + x] = v;
}

void Canvas::disk(int cx, int cy, int r, std::uint8_t v) {
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) set(cx + dx, cy + dy, v);
}

void Canvas::circle(int cx, int cy, int r, std::uint8_t v) {
    const int steps = std::max(64, 8 * r);
    for (int i = 0; i < steps; ++i) {
        const double a = 2.0 * M_PI * i / steps;
        set(cx + int(std::lround(r * std::cos(a))), cy + int(std::lround(r * std::sin(a))), v);
    }
}

void Canvas::line(int x0, int y0, int x1, int y1, std::uint8_t v) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        set(x0, y0, v);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Canvas::save_pgm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()), std::streamsize(gray.size()));
}

namespace {

std::string csv_row(const std::vector<double>& vals) {
    std::string row;
    char buf[32];
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
        if (i) row += ',';
        row += buf;
    }
    return row + "\n";
}

}  // namespace

void plot_wafer(const WaferMap& w, const std::string& stem) {
    const int size = 512, margin = 12;
    const double scale = (size / 2.0 - margin) / kWaferRadius;
    Canvas c(size, size);
    c.circle(size / 2, size / 2, int(kWaferRadius * scale), 128);
    for (const auto& p : w.points)
        c.disk(size / 2 + int(std::lround(p.x * scale)),
               size / 2 - int(std::lround(p.y * scale)), 2, 0);
    c.save_pgm(stem + ".pgm");

    std::string csv = "x,y\n";
    for (const auto& p : w.points) csv += csv_row({p.x, p.y});
    write_text(csv, stem + ".csv");
}

void plot_diagram(const PersistenceDiagram& d, const std::string& stem) {
    const int size = 512, margin = 24;
    double hi = 1.0;
    for (const auto& p : d.pairs) hi = std::max({hi, p.birth, p.death});
    const double scale = (size - 2.0 * margin) / hi;
    Canvas c(size, size);
    auto px = [&](double v) { return margin + int(std::lround(v * scale)); };
    auto py = [&](double v) { return size - margin - int(std::lround(v * scale)); };
    c.line(px(0), py(0), px(hi), py(hi), 160);  // diagonal reference
    c.line(px(0), py(0), px(hi), py(0), 80);    // axes
    c.line(px(0), py(0), px(0), py(hi), 80);
    for (const auto& p : d.pairs) c.disk(px(p.birth), py(p.death), 3, 0);
    c.save_pgm(stem + ".pgm");

    std::string csv = "birth,death\n";
    for (const auto& p : d.pairs) csv += csv_row({p.birth, p.death});
    write_text(csv, stem + ".csv");
}

void plot_pi(const PersistenceImage& img, const std::string& stem) {
    const int cell = 24;
    const double hi = std::max(1e-300, *std::max_element(img.pixels.begin(), img.pixels.end()));
    Canvas c(img.nx * cell, img.ny * cell);
    for (int j = 0; j < img.ny; ++j)
        for (int i = 0; i < img.nx; ++i) {
            const auto v = std::uint8_t(255.0 * (1.0 - img.at(j, i) / hi));
            for (int dy = 0; dy < cell; ++dy)
                for (int dx = 0; dx < cell; ++dx)
                    c.set(i * cell + dx, (img.ny - 1 - j) * cell + dy, v);
        }
    c.save_pgm(stem + ".pgm");

    std::string csv;
    for (int j = 0; j < img.ny; ++j) {
        std::vector<double> row(std::size_t(img.nx));
        for (int i = 0; i < img.nx; ++i) row[std::size_t(i)] = img.at(j, i);
        csv += csv_row(row);
    }
    write_text(csv, stem + ".csv");
}

namespace {

void plot_metric(const std::vector<double>& vals, const std::string& stem) {
    const int w = 640, h = 400, margin = 24;
    Canvas c(w, h);
    double hi = 1e-12;
    for (double v : vals) hi = std::max(hi, v);
    c.line(margin, h - margin, w - margin, h - margin, 80);
    c.line(margin, h - margin, margin, margin, 80);
    int lx = -1, ly = -1;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const int x = margin + int((w - 2.0 * margin) * double(i) / std::max<std::size_t>(1, vals.size() - 1));
        const int y = h - margin - int((h - 2.0 * margin) * vals[i] / hi);
        if (lx >= 0) c.line(lx, ly, x, y, 0);
        lx = x;
        ly = y;
    }
    c.save_pgm(stem + ".pgm");
    std::string csv = "epoch,value\n";
    for (std::size_t i = 0; i < vals.size(); ++i) csv += csv_row({double(i), vals[i]});
    write_text(csv, stem + ".csv");
}

}  // namespace

void plot_curves(const EvalReport& report, const std::string& stem) {
    if (!report.train_acc.empty()) plot_metric(report.train_acc, stem + "_train_acc");
    if (!report.train_loss.empty()) plot_metric(report.train_loss, stem + "_train_loss");
    if (!report.val_acc.empty()) plot_metric(report.val_acc, stem + "_val_acc");
    if (!report.val_loss.empty()) plot_metric(report.val_loss, stem + "_val_loss");
}

void plot_confusion(const std::vector<std::vector<long>>& confusion, const std::string& stem) {
    const int n = int(confusion.size());
    const int cell = 64;
    long hi = 1;
    for (const auto& row : confusion)
        for (long v : row) hi = std::max(hi, v);
    Canvas c(n * cell, n * cell);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto v = std::uint8_t(255.0 * (1.0 - double(confusion[i][j]) / double(hi)));
            for (int dy = 1; dy < cell; ++dy)
                for (int dx = 1; dx < cell; ++dx) c.set(j * cell + dx, i * cell + dy, v);
        }
    c.save_pgm(stem + ".pgm");

    std::string csv;
    for (const auto& row : confusion) {
        std::vector<double> vals(row.begin(), row.end());
        csv += csv_row(vals);
    }
    write_text(csv, stem + ".csv");
}

}  // namespace wtda
