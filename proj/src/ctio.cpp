#include "ldct/ctio.hpp"

#include <algorithm>
#include <cmath>

namespace ldct::ctio {

void CTSlice::validate() const {
    if (rows <= 0 || cols <= 0) throw DataError("CTSlice: rows/cols must be positive");
    if (pixels.ndim() != 2 || pixels.dim(0) != rows || pixels.dim(1) != cols)
        throw ShapeMismatch("CTSlice: pixel shape does not match rows/cols");
    for (std::int64_t i = 0; i < pixels.numel(); ++i)
        if (!std::isfinite(pixels[i])) throw DataError("CTSlice: non-finite pixel");
}

WindowSpec::WindowSpec(double c, double w, double ymin, double ymax, DivisorMode mode)
    : level_c(c), width_w(w), y_min(ymin), y_max(ymax), divisor_mode(mode) {
    if (!(width_w > 0.0)) throw ConfigError("WindowSpec: width must be > 0");
    if (!(y_max > y_min)) throw ConfigError("WindowSpec: y_max must exceed y_min");
}

double apply_window_scalar(double x, const WindowSpec& spec) {
    const double half = (spec.width_w - 1.0) / 2.0;
    const double pivot = spec.level_c - 0.5;
    if (x <= pivot - half) return spec.y_min;
    if (x > pivot + half) return spec.y_max;
    const double divisor =
        spec.divisor_mode == DivisorMode::paper_w_plus_1 ? spec.width_w + 1.0 : spec.width_w - 1.0;
    const double y = ((x - pivot) / divisor + 0.5) * (spec.y_max - spec.y_min) + spec.y_min;
    return std::clamp(y, spec.y_min, spec.y_max);
}

Tensor apply_window(const Tensor& hu_pixels, const WindowSpec& spec) {
    Tensor out(hu_pixels.shape());
    for (std::int64_t i = 0; i < hu_pixels.numel(); ++i) out[i] = apply_window_scalar(hu_pixels[i], spec);
    return out;
}

Tensor apply_window(const CTSlice& slice, const WindowSpec& spec) {
    return apply_window(slice.pixels, spec);
}

Tensor normalize_for_model(const Tensor& display, double y_min, double y_max) {
    if (y_max == y_min) throw DegenerateRange("normalize_for_model: y_max equals y_min");
    const double s = 2.0 / (y_max - y_min);
    Tensor out(display.shape());
    for (std::int64_t i = 0; i < display.numel(); ++i) out[i] = (display[i] - y_min) * s - 1.0;
    return out;
}

Tensor denormalize(const Tensor& model, double y_min, double y_max) {
    if (y_max == y_min) throw DegenerateRange("denormalize: y_max equals y_min");
    const double s = (y_max - y_min) / 2.0;
    Tensor out(model.shape());
    for (std::int64_t i = 0; i < model.numel(); ++i) out[i] = (model[i] + 1.0) * s + y_min;
    return out;
}

Slab3 stack_neighbors(const std::vector<CTSlice>& volume, int index) {
    if (index < 0 || index >= static_cast<int>(volume.size()))
        throw IndexOutOfRange("stack_neighbors: index outside volume");
    const std::string& sid = volume.front().series_id;
    for (const auto& s : volume)
        if (s.series_id != sid) throw DataError("stack_neighbors: volume mixes series");
    Slab3 slab;
    slab.center = volume[static_cast<std::size_t>(index)];
    slab.above = index > 0 ? volume[static_cast<std::size_t>(index - 1)] : slab.center;
    slab.below =
        index + 1 < static_cast<int>(volume.size()) ? volume[static_cast<std::size_t>(index + 1)] : slab.center;
    return slab;
}

Tensor slab_tensor(const Slab3& slab) {
    const int H = slab.center.rows, W = slab.center.cols;
    if (slab.above.rows != H || slab.below.rows != H || slab.above.cols != W || slab.below.cols != W)
        throw ShapeMismatch("slab_tensor: slice sizes differ");
    Tensor out({3, H, W});
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    for (std::int64_t i = 0; i < plane; ++i) {
        out[i] = slab.above.pixels[i];
        out[plane + i] = slab.center.pixels[i];
        out[2 * plane + i] = slab.below.pixels[i];
    }
    return out;
}

Tensor replicate_slab(const Tensor& image_hw) {
    if (image_hw.ndim() != 2) throw ShapeMismatch("replicate_slab: expected {H,W}");
    const std::int64_t plane = image_hw.numel();
    Tensor out({3, image_hw.dim(0), image_hw.dim(1)});
    for (int d = 0; d < 3; ++d)
        for (std::int64_t i = 0; i < plane; ++i) out[d * plane + i] = image_hw[i];
    return out;
}

void PhantomSpec::validate() const {
    if (size_px < 32) throw ConfigError("PhantomSpec: size_px must be >= 32");
    if (!(disc_contrast_pct > 0.0)) throw ConfigError("PhantomSpec: disc_contrast_pct must be > 0");
    if (disc_diameter_px <= 0 || disc_diameter_px > size_px)
        throw ConfigError("PhantomSpec: disc diameter outside image");
    if (noise_sigma_hu < 0.0) throw ConfigError("PhantomSpec: noise_sigma_hu must be >= 0");
    if (!(photon_scale > 0.0)) throw ConfigError("PhantomSpec: photon_scale must be > 0");
}

PhantomPair make_phantom(const PhantomSpec& spec) {
    spec.validate();
    const int n = spec.size_px;
    const double bg = kPhantomBackgroundHU;
    const double disc = bg * (1.0 + spec.disc_contrast_pct / 100.0);
    const double cc = (n - 1) / 2.0;
    const double r = spec.disc_diameter_px / 2.0;

    Tensor clean({n, n}, bg);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double dy = y - cc, dx = x - cc;
            if (dy * dy + dx * dx <= r * r) clean.at(y, x) = disc;
        }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Tensor noisy(clean.shape());
    const bool poisson_on = std::isfinite(spec.photon_scale);
    for (std::int64_t i = 0; i < clean.numel(); ++i) {
        double v = clean[i];
        if (poisson_on) {
            const double lambda = (v + kPhantomPoissonOffsetHU) * spec.photon_scale;
            std::poisson_distribution<long> pois(lambda);
            v = static_cast<double>(pois(rng)) / spec.photon_scale - kPhantomPoissonOffsetHU;
        }
        if (spec.noise_sigma_hu > 0.0) v += spec.noise_sigma_hu * gauss(rng);
        noisy[i] = v;
    }

    PhantomPair pair;
    pair.ndct = CTSlice{std::move(clean), n, n, 120, 1.0, 0, "phantom-ndct"};
    pair.ldct = CTSlice{std::move(noisy), n, n, 80, 1.0, 0, "phantom-ldct"};
    return pair;
}

double phantom_noise_variance(const PhantomSpec& spec) {
    double var = spec.noise_sigma_hu * spec.noise_sigma_hu;
    if (std::isfinite(spec.photon_scale))
        var += (kPhantomBackgroundHU + kPhantomPoissonOffsetHU) / spec.photon_scale;
    return var;
}

DomainDataset::DomainDataset(DomainTag tag, std::vector<CTSlice> slices, std::uint64_t sampling_seed)
    : tag_(tag), slices_(std::move(slices)), sampling_seed_(sampling_seed) {
    if (slices_.empty()) throw EmptyDataset("DomainDataset: no slices");
}

Tensor random_crop(const Tensor& image_hw, int patch, std::mt19937_64& rng) {
    if (image_hw.ndim() != 2) throw ShapeMismatch("random_crop: expected {H,W}");
    const int H = image_hw.dim(0), W = image_hw.dim(1);
    if (patch > H || patch > W) throw ShapeMismatch("random_crop: patch larger than image");
    int y0 = 0, x0 = 0;
    if (H > patch) y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(H - patch + 1));
    if (W > patch) x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(W - patch + 1));
    Tensor out({patch, patch});
    for (int y = 0; y < patch; ++y)
        for (int x = 0; x < patch; ++x) out.at(y, x) = image_hw.at(y0 + y, x0 + x);
    return out;
}

} // namespace ldct::ctio
