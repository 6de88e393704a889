#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sst/error.hpp"

namespace sst {

struct PixelCoord {
    std::int32_t row = 0;
    std::int32_t col = 0;

    bool operator==(const PixelCoord&) const = default;
};

/// Read-only view of an H×W grid of per-pixel feature vectors,
/// row-major pixels, channel-fastest.
struct PlaneView {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    const double* values = nullptr;

    std::size_t pixel_count() const noexcept { return height * width; }
    const double* pixel(std::size_t n) const noexcept { return values + n * channels; }
    const double* at(std::size_t r, std::size_t c) const noexcept {
        return pixel(r * width + c);
    }
};

/// H×W×B reflectance volume, row-major by pixel then band.
class HsiCube {
public:
    HsiCube(std::size_t height, std::size_t width, std::size_t bands,
            std::vector<double> values);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t bands() const noexcept { return bands_; }
    std::size_t pixel_count() const noexcept { return height_ * width_; }

    const std::vector<double>& values() const noexcept { return values_; }
    const double* pixel(std::size_t n) const noexcept { return values_.data() + n * bands_; }
    double at(std::size_t r, std::size_t c, std::size_t b) const noexcept {
        return values_[(r * width_ + c) * bands_ + b];
    }

    PlaneView plane() const noexcept { return {height_, width_, bands_, values_.data()}; }

private:
    std::size_t height_, width_, bands_;
    std::vector<double> values_;
};

/// Per-pixel class indices in {0..C}; 0 means unlabeled.
class LabelMap {
public:
    LabelMap(std::size_t height, std::size_t width, std::uint16_t class_count,
             std::vector<std::uint16_t> labels);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::uint16_t class_count() const noexcept { return class_count_; }

    const std::vector<std::uint16_t>& labels() const noexcept { return labels_; }
    std::uint16_t at(std::size_t r, std::size_t c) const noexcept {
        return labels_[r * width_ + c];
    }

private:
    std::size_t height_, width_;
    std::uint16_t class_count_;
    std::vector<std::uint16_t> labels_;
};

/// Per-pixel forward differences of adjacent bands; B-1 bands.
class SpectralDerivative {
public:
    SpectralDerivative(std::size_t height, std::size_t width, std::size_t bands,
                       std::vector<double> values);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t bands() const noexcept { return bands_; }

    const std::vector<double>& values() const noexcept { return values_; }
    const double* pixel(std::size_t n) const noexcept { return values_.data() + n * bands_; }

    PlaneView plane() const noexcept { return {height_, width_, bands_, values_.data()}; }

private:
    std::size_t height_, width_, bands_;
    std::vector<double> values_;
};

/// Per-pixel semantic feature vectors, C1 channels.
class FeatureMap {
public:
    FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
               std::vector<double> values);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t channels() const noexcept { return channels_; }

    const std::vector<double>& values() const noexcept { return values_; }
    const double* pixel(std::size_t n) const noexcept { return values_.data() + n * channels_; }

    PlaneView plane() const noexcept { return {height_, width_, channels_, values_.data()}; }

private:
    std::size_t height_, width_, channels_;
    std::vector<double> values_;
};

/// Deterministic producer of semantic features: identical cube and identical
/// provider configuration must yield an identical FeatureMap.
class FeatureProvider {
public:
    virtual ~FeatureProvider() = default;
    virtual std::size_t output_channels() const = 0;
    virtual FeatureMap compute(const HsiCube& cube) const = 0;
};

}  // namespace sst
