#pragma once

#include <png.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "tanglemap/depth_image.hpp"
#include "tanglemap/errors.hpp"
#include "tanglemap/grid.hpp"

namespace tanglemap {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(Rgb a, Rgb b) = default;
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace detail

/// Write a depth image as 16-bit grayscale PNG, millimeter-valued. Invalid
/// pixels encode as 0; valid millimeters round to the nearest integer.
inline void write_depth_png(const std::string& path, const DepthImage& img) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(img.width()) * 2);
    for (int y = 0; y < img.height(); y++) {
        for (int x = 0; x < img.width(); x++) {
            uint16_t v = 0;
            if (img.is_valid(x, y)) {
                const long mm = std::lround(img.at(x, y));
                v = static_cast<uint16_t>(std::clamp(mm, 1L, 65535L));
            }
            row[2 * x] = static_cast<uint8_t>(v >> 8); // big-endian per PNG
            row[2 * x + 1] = static_cast<uint8_t>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Read a 16-bit grayscale depth PNG; 0 marks invalid pixels.
inline DepthImage read_depth_png(const std::string& path, const Intrinsics& k,
                                 double max_range_mm = kDefaultMaxRangeMm) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open for reading: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("not a readable PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int w = png_get_image_width(png, info);
    const int h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("expected 16-bit grayscale PNG: " + path);
    }

    std::vector<std::vector<uint8_t>> rows(h, std::vector<uint8_t>(static_cast<size_t>(w) * 2));
    std::vector<png_bytep> row_ptrs(h);
    for (int y = 0; y < h; y++) row_ptrs[y] = rows[y].data();
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Intrinsics kk = k;
    if (kk.cx < 0.0) kk.cx = (w - 1) / 2.0;
    if (kk.cy < 0.0) kk.cy = (h - 1) / 2.0;

    DepthImage img(w, h, kk);
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            const uint16_t v = static_cast<uint16_t>((rows[y][2 * x] << 8) | rows[y][2 * x + 1]);
            if (v != 0) img.set(x, y, static_cast<float>(v));
        }
    img.validate(max_range_mm);
    return img;
}

inline void write_rgb_png(const std::string& path, const Grid<Rgb>& img) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<uint8_t> row(static_cast<size_t>(img.width()) * 3);
    for (int y = 0; y < img.height(); y++) {
        for (int x = 0; x < img.width(); x++) {
            const Rgb c = img.at(x, y);
            row[3 * x] = c.r;
            row[3 * x + 1] = c.g;
            row[3 * x + 2] = c.b;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline void write_gray_png(const std::string& path, const MaskGrid& img) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<uint8_t> row(img.width());
    for (int y = 0; y < img.height(); y++) {
        for (int x = 0; x < img.width(); x++) row[x] = img.at(x, y);
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline MaskGrid read_gray_png(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open for reading: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("not a readable PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_bit_depth(png, info) != 8 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("expected 8-bit grayscale PNG: " + path);
    }
    const int w = png_get_image_width(png, info);
    const int h = png_get_image_height(png, info);
    std::vector<std::vector<uint8_t>> rows(h, std::vector<uint8_t>(w));
    std::vector<png_bytep> row_ptrs(h);
    for (int y = 0; y < h; y++) row_ptrs[y] = rows[y].data();
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    MaskGrid out(w, h, 0);
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) out.at(x, y) = rows[y][x];
    return out;
}

/// Fixed heatmap lookup: four linear stops, deep blue through cyan and green
/// to yellow. Stable across builds so image goldens stay valid.
inline Rgb heatmap_color(double v01) {
    static constexpr std::array<std::array<double, 3>, 4> stops{{
        {32, 24, 128},  // 0.00 deep blue
        {0, 160, 192},  // 0.33 cyan
        {32, 192, 64},  // 0.67 green
        {255, 224, 32}, // 1.00 yellow
    }};
    const double v = std::clamp(v01, 0.0, 1.0) * 3.0;
    const int s = std::min(2, static_cast<int>(v));
    const double t = v - s;
    auto lerp = [&](int ch) {
        return static_cast<uint8_t>(std::lround(stops[s][ch] * (1 - t) + stops[s + 1][ch] * t));
    };
    return {lerp(0), lerp(1), lerp(2)};
}

} // namespace tanglemap
