#include "sst/cube.hpp"

#include <cmath>
#include <string>

namespace sst {

namespace {

void check_all_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v))
            throw invalid_input_error(std::string(what) + ": values must be finite");
    }
}

}  // namespace

HsiCube::HsiCube(std::size_t height, std::size_t width, std::size_t bands,
                 std::vector<double> values)
    : height_(height), width_(width), bands_(bands), values_(std::move(values)) {
    if (height_ < 1 || width_ < 1)
        throw invalid_input_error("HsiCube: height and width must be >= 1");
    if (bands_ < 2)
        throw invalid_input_error("HsiCube: at least 2 bands required");
    if (values_.size() != height_ * width_ * bands_)
        throw invalid_input_error("HsiCube: value count does not match H*W*B");
    check_all_finite(values_, "HsiCube");
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::uint16_t class_count,
                   std::vector<std::uint16_t> labels)
    : height_(height), width_(width), class_count_(class_count), labels_(std::move(labels)) {
    if (height_ < 1 || width_ < 1)
        throw invalid_input_error("LabelMap: height and width must be >= 1");
    if (labels_.size() != height_ * width_)
        throw invalid_input_error("LabelMap: label count does not match H*W");
    for (std::uint16_t l : labels_) {
        if (l > class_count_)
            throw invalid_input_error("LabelMap: label " + std::to_string(l) +
                                      " exceeds class count " + std::to_string(class_count_));
    }
}

SpectralDerivative::SpectralDerivative(std::size_t height, std::size_t width,
                                       std::size_t bands, std::vector<double> values)
    : height_(height), width_(width), bands_(bands), values_(std::move(values)) {
    if (height_ < 1 || width_ < 1 || bands_ < 1)
        throw invalid_input_error("SpectralDerivative: empty dimensions");
    if (values_.size() != height_ * width_ * bands_)
        throw invalid_input_error("SpectralDerivative: value count mismatch");
    check_all_finite(values_, "SpectralDerivative");
}

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
                       std::vector<double> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
    if (height_ < 1 || width_ < 1)
        throw invalid_input_error("FeatureMap: height and width must be >= 1");
    if (channels_ < 1)
        throw invalid_input_error("FeatureMap: at least 1 channel required");
    if (values_.size() != height_ * width_ * channels_)
        throw invalid_input_error("FeatureMap: value count mismatch");
    check_all_finite(values_, "FeatureMap");
}

}  // namespace sst
