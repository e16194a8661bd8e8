#pragma once

#include <filesystem>

#include "fpp/data/dataset.hpp"

namespace fpp {

/// Dataset directory: features.npy (N x D, f8), responses.csv (one column per
/// response, categorical cells as class names) and meta.json (response kinds,
/// class order, column names, synthetic ground truth).
void write_bundle(const std::filesystem::path& dir, const Dataset& data);

/// Reads a bundle written by write_bundle(). Without meta.json every response
/// column is taken as continuous.
Dataset read_bundle(const std::filesystem::path& dir);

}  // namespace fpp
