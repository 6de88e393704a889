#include "sst/features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace sst {

SpectralDerivative spectral_derivative(const HsiCube& cube) {
    if (cube.bands() < 2)
        throw invalid_input_error("spectral_derivative: need at least 2 bands");
    const std::size_t n = cube.pixel_count();
    const std::size_t b_out = cube.bands() - 1;
    std::vector<double> out(n * b_out);
    for (std::size_t p = 0; p < n; ++p) {
        const double* src = cube.pixel(p);
        double* dst = out.data() + p * b_out;
        for (std::size_t i = 0; i < b_out; ++i) dst[i] = src[i + 1] - src[i];
    }
    return SpectralDerivative(cube.height(), cube.width(), b_out, std::move(out));
}

PcaFeatureProvider::PcaFeatureProvider(std::size_t channels, std::size_t smoothing_radius)
    : channels_(channels), radius_(smoothing_radius) {
    if (channels_ < 1)
        throw invalid_input_error("PcaFeatureProvider: channels must be >= 1");
}

FeatureMap PcaFeatureProvider::compute(const HsiCube& cube) const {
    const std::size_t b = cube.bands();
    if (channels_ > b)
        throw invalid_input_error("PcaFeatureProvider: channels exceed band count");

    const std::size_t h = cube.height();
    const std::size_t w = cube.width();
    const std::size_t n = h * w;
    const long r = static_cast<long>(radius_);

    // Box-mean smoothing over a (2r+1)^2 window with edge replication.
    std::vector<double> smoothed(n * b, 0.0);
    const double window_inv = 1.0 / static_cast<double>((2 * r + 1) * (2 * r + 1));
    for (std::size_t row = 0; row < h; ++row) {
        for (std::size_t col = 0; col < w; ++col) {
            double* dst = smoothed.data() + (row * w + col) * b;
            for (long dr = -r; dr <= r; ++dr) {
                const std::size_t rr = static_cast<std::size_t>(
                    std::clamp<long>(static_cast<long>(row) + dr, 0, static_cast<long>(h) - 1));
                for (long dc = -r; dc <= r; ++dc) {
                    const std::size_t cc = static_cast<std::size_t>(std::clamp<long>(
                        static_cast<long>(col) + dc, 0, static_cast<long>(w) - 1));
                    const double* src = cube.pixel(rr * w + cc);
                    for (std::size_t band = 0; band < b; ++band) dst[band] += src[band];
                }
            }
            for (std::size_t band = 0; band < b; ++band) dst[band] *= window_inv;
        }
    }

    // Mean spectrum and covariance over the smoothed pixels, accumulated in
    // row-major pixel order.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<long>(b));
    for (std::size_t p = 0; p < n; ++p)
        mean += Eigen::Map<const Eigen::VectorXd>(smoothed.data() + p * b, static_cast<long>(b));
    mean /= static_cast<double>(n);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<long>(b), static_cast<long>(b));
    for (std::size_t p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::VectorXd> x(smoothed.data() + p * b, static_cast<long>(b));
        const Eigen::VectorXd centered = x - mean;
        cov.noalias() += centered * centered.transpose();
    }
    cov /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    // Eigenvalues come back ascending; take the trailing channels_ columns in
    // descending order and fix each component's sign so its largest-magnitude
    // entry is positive.
    Eigen::MatrixXd basis(static_cast<long>(b), static_cast<long>(channels_));
    for (std::size_t c = 0; c < channels_; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(static_cast<long>(b - 1 - c));
        long argmax = 0;
        double best = 0.0;
        for (long i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) > best) {
                best = std::abs(v[i]);
                argmax = i;
            }
        }
        if (v[argmax] < 0.0) v = -v;
        basis.col(static_cast<long>(c)) = v;
    }

    std::vector<double> features(n * channels_);
    for (std::size_t p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::VectorXd> x(smoothed.data() + p * b, static_cast<long>(b));
        Eigen::Map<Eigen::VectorXd> dst(features.data() + p * channels_,
                                        static_cast<long>(channels_));
        dst = basis.transpose() * (x - mean);
    }
    return FeatureMap(h, w, channels_, std::move(features));
}

Matrix sample_at(std::span<const PixelCoord> coords, const PlaneView& source) {
    Matrix out(coords.size(), source.channels);
    for (std::size_t m = 0; m < coords.size(); ++m) {
        const PixelCoord c = coords[m];
        if (c.row < 0 || c.col < 0 || static_cast<std::size_t>(c.row) >= source.height ||
            static_cast<std::size_t>(c.col) >= source.width)
            throw invalid_input_error("sample_at: coordinate out of bounds");
        const double* src = source.at(static_cast<std::size_t>(c.row),
                                      static_cast<std::size_t>(c.col));
        std::copy(src, src + source.channels, out.row(m));
    }
    return out;
}

}  // namespace sst
