#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ldct/tensor.hpp"

namespace ldct::ctio {

// One CT slice in Hounsfield units plus the acquisition metadata we care about.
struct CTSlice {
    Tensor pixels; // {rows, cols}, HU
    int rows = 0;
    int cols = 0;
    int kv = 0;
    double thickness_mm = 0.0;
    int slice_index = 0;
    std::string series_id;

    void validate() const;
};

enum class DivisorMode { paper_w_plus_1, dicom_w_minus_1 };

// Display window: level c, width w, output range [y_min, y_max].
struct WindowSpec {
    double level_c = 40.0;
    double width_w = 300.0;
    double y_min = 0.0;
    double y_max = 255.0;
    DivisorMode divisor_mode = DivisorMode::paper_w_plus_1;

    WindowSpec() = default;
    WindowSpec(double c, double w, double ymin, double ymax,
               DivisorMode mode = DivisorMode::paper_w_plus_1);

    double lower_threshold() const { return level_c - 0.5 - (width_w - 1.0) / 2.0; }
    double upper_threshold() const { return level_c - 0.5 + (width_w - 1.0) / 2.0; }
};

// Piecewise window transform applied elementwise:
//   y = y_min                                      for x <= c - 0.5 - (w-1)/2
//   y = ((x - (c-0.5))/divisor + 0.5)(y_max-y_min) + y_min   otherwise, clamped
//   y = y_max                                      for x >  c - 0.5 + (w-1)/2
// The divisor is (w+1) in paper mode and (w-1) in DICOM VOI LUT mode.
double apply_window_scalar(double x, const WindowSpec& spec);
Tensor apply_window(const Tensor& hu_pixels, const WindowSpec& spec);
Tensor apply_window(const CTSlice& slice, const WindowSpec& spec);

// Affine map [y_min, y_max] -> [-1, 1] and its inverse.
Tensor normalize_for_model(const Tensor& display, double y_min, double y_max);
Tensor denormalize(const Tensor& model, double y_min, double y_max);

struct Slab3 {
    CTSlice center;
    CTSlice above;
    CTSlice below;
};

// Neighbors at index +/- 1 with edge replication at volume boundaries. All
// slices must come from one series, ordered by slice_index.
Slab3 stack_neighbors(const std::vector<CTSlice>& volume, int index);

// {3, H, W} tensor ordered (above, center, below) for the 2.5D generator.
Tensor slab_tensor(const Slab3& slab);
Tensor replicate_slab(const Tensor& image_hw);

struct PhantomSpec {
    int size_px = 64;
    double disc_contrast_pct = 1.0;
    int disc_diameter_px = 15;
    double noise_sigma_hu = 25.0;
    double photon_scale = 0.5; // infinity disables the Poisson component
    std::uint64_t seed = 0;

    void validate() const;
};

// Background level for synthetic phantoms (soft-tissue-like HU) and the fixed
// offset that keeps the Poisson intensities positive.
inline constexpr double kPhantomBackgroundHU = 60.0;
inline constexpr double kPhantomPoissonOffsetHU = 1000.0;

struct PhantomPair {
    CTSlice ndct;
    CTSlice ldct;
};

// Clean disc-on-background slice plus its noise-corrupted counterpart.
// Deterministic for a given spec (the seed only drives the noise draws).
PhantomPair make_phantom(const PhantomSpec& spec);

// Closed-form variance of the Poisson + Gaussian mixture over the background.
double phantom_noise_variance(const PhantomSpec& spec);

enum class DomainTag { LDCT, NDCT };

// Unpaired training domain: an ordered pile of slices with a seeded uniform
// sampler. Read-only after construction.
class DomainDataset {
  public:
    DomainDataset(DomainTag tag, std::vector<CTSlice> slices, std::uint64_t sampling_seed);

    DomainTag tag() const { return tag_; }
    std::size_t size() const { return slices_.size(); }
    const CTSlice& slice(std::size_t i) const { return slices_[i]; }
    const std::vector<CTSlice>& slices() const { return slices_; }

    // Fresh sampler stream; equal seeds give identical index sequences.
    std::mt19937_64 make_sampler() const { return std::mt19937_64(sampling_seed_); }
    std::uint64_t sampling_seed() const { return sampling_seed_; }

  private:
    DomainTag tag_;
    std::vector<CTSlice> slices_;
    std::uint64_t sampling_seed_;
};

// Random aligned square crop in display space; crop == image size is identity.
Tensor random_crop(const Tensor& image_hw, int patch, std::mt19937_64& rng);

} // namespace ldct::ctio
