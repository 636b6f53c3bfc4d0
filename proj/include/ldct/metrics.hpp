#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldct/losses.hpp"
#include "ldct/tensor.hpp"

namespace ldct::metrics {

// Circular region of interest. The circle is centered on the pixel-grid
// lattice point (center_row, center_col); a pixel belongs to the ROI when its
// center (row + 0.5, col + 0.5) lies within radius_px of that point. A
// radius-1 circle therefore selects exactly the 2x2 block around the corner.
struct ROISpec {
    int center_row = 0;
    int center_col = 0;
    int radius_px = 1;
    std::string label;
};

inline constexpr double kPsnrCap = 99.0; // reported for identical images

double psnr(const Tensor& reference, const Tensor& test, double max_value);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double max_value = 255.0;
};

// Mean local SSIM over all fully-inside window positions (Gaussian-weighted
// statistics, population form).
double ssim(const Tensor& reference, const Tensor& test, const SsimParams& params = {});

// Same computation as loss::perceptual_loss, exposed for evaluation.
double perceptual_metric(const Tensor& reference, const Tensor& test,
                         const loss::PerceptualConfig& config,
                         const loss::FeatureExtractor& extractor);

// mean(ROI) / population std(ROI).
double snr(const Tensor& image, const ROISpec& roi);
// |mean(signal ROI) - mean(background ROI)| / population std(background ROI).
double cnr(const Tensor& image, const ROISpec& roi_signal, const ROISpec& roi_background);

std::vector<std::int64_t> roi_indices(const Tensor& image, const ROISpec& roi);

struct MetricsRow {
    std::string id;
    double psnr_db = 0.0;
    double ssim_value = 0.0;
    double pl = 0.0;
    std::optional<double> snr_value;
    std::optional<double> cnr_value;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0; // population
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    Aggregate psnr_agg, ssim_agg, pl_agg;
    std::optional<Aggregate> snr_agg, cnr_agg;
    std::string window_note; // window/ROI provenance, echoed into the table
    std::vector<ROISpec> rois;

    std::string table() const;
    void write_jsonl(const std::string& path) const;
};

struct EvalItem {
    std::string id;
    Tensor reference; // display-space {H,W}
    Tensor test;
    // When set, ROI metrics (SNR/CNR) are taken over these raw HU pixels
    // instead of the display-space test image.
    std::optional<Tensor> test_hu;
};

struct EvalConfig {
    double max_value = 255.0;
    SsimParams ssim_params;
    loss::PerceptualConfig perceptual = loss::PerceptualConfig::defaults();
    std::optional<ROISpec> roi_signal;
    std::optional<ROISpec> roi_background;
    std::string window_note;
    // PL is computed on [-1,1]-normalized copies of the display images.
    double norm_lo = 0.0;
    double norm_hi = 255.0;
};

MetricsReport evaluate_report(const std::vector<EvalItem>& items, const EvalConfig& config);

} // namespace ldct::metrics
