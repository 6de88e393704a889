#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sst/cube.hpp"
#include "sst/matrix.hpp"

namespace sst {

/// Forward difference of adjacent bands per pixel; output has B-1 bands.
SpectralDerivative spectral_derivative(const HsiCube& cube);

/// Semantic features from box-mean smoothed spectra projected onto the
/// top-C1 principal components (computed per cube, mean-centred, component
/// signs fixed so each component's largest-magnitude entry is positive).
/// Smoothing replicates edge pixels.
class PcaFeatureProvider : public FeatureProvider {
public:
    PcaFeatureProvider(std::size_t channels, std::size_t smoothing_radius);

    std::size_t output_channels() const override { return channels_; }
    std::size_t smoothing_radius() const noexcept { return radius_; }
    FeatureMap compute(const HsiCube& cube) const override;

private:
    std::size_t channels_;
    std::size_t radius_;
};

/// Row m of the result is the feature vector at coords[m] (nearest pixel,
/// no interpolation).
Matrix sample_at(std::span<const PixelCoord> coords, const PlaneView& source);

}  // namespace sst
