#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sst/classifier.hpp"
#include "sst/cube.hpp"

namespace sst {

// Cube file: magic "HSIC", u16 version (1), u32 H, u32 W, u32 B, then H*W*B
// 32-bit floats; everything little-endian, row-major pixel order,
// band-fastest. The same container stores token feature tables (H = token
// count, W = 1, B = channels), which may have a single band, so the raw layer
// does not impose the HsiCube band minimum.
struct RawCube {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t bands = 0;
    std::vector<double> values;
};

void write_cube_file(const std::string& path, const RawCube& cube);
RawCube read_raw_cube(const std::string& path);

void write_cube(const std::string& path, const HsiCube& cube);
HsiCube read_cube(const std::string& path);

// Label file: magic "HSIL", u16 version (1), u32 H, u32 W, u16 C, then H*W
// u16 labels, little-endian. Labels must not exceed C.
void write_label_file(const std::string& path, const LabelMap& labels);
LabelMap read_label_file(const std::string& path);

// Checkpoint: magic "SSTP", u16 version (1), u32 tensor count, then per
// tensor u32 rows and u32 cols, then every tensor's entries as 32-bit floats
// in declaration order.
void write_checkpoint(const std::string& path, const ClassifierParams& params);

/// Loads a checkpoint into parameters whose shapes were derived from the
/// configuration; any shape disagreement is an error.
void read_checkpoint_into(const std::string& path, ClassifierParams& params);

/// Loads a checkpoint given the block pattern and feature width from the
/// configuration; the class count is taken from the stored head shape.
ClassifierParams read_checkpoint(const std::string& path, std::span<const BlockKind> pattern,
                                 std::size_t feature_dim);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace sst
