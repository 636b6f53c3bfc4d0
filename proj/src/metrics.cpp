#include "ldct/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ldct/ctio.hpp"

namespace ldct::metrics {

double psnr(const Tensor& reference, const Tensor& test, double max_value) {
    if (!reference.same_shape(test)) throw ShapeMismatch("psnr: shapes differ");
    if (!(max_value > 0)) throw ConfigError("psnr: max_value must be > 0");
    double mse = 0.0;
    for (std::int64_t i = 0; i < reference.numel(); ++i) {
        const double d = reference[i] - test[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.numel());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(max_value * max_value / mse));
}

double ssim(const Tensor& reference, const Tensor& test, const SsimParams& p) {
    if (!reference.same_shape(test)) throw ShapeMismatch("ssim: shapes differ");
    if (reference.ndim() != 2) throw ShapeMismatch("ssim: expected {H,W} single-channel images");
    const int H = reference.dim(0), W = reference.dim(1);
    const int win = p.window;
    if (H < win || W < win) throw ImageTooSmall("ssim: image smaller than the local window");

    // Normalized 1D Gaussian taps; the 2D window is the outer product.
    std::vector<double> g(static_cast<std::size_t>(win));
    const double c = (win - 1) / 2.0;
    double gsum = 0.0;
    for (int i = 0; i < win; ++i) {
        g[static_cast<std::size_t>(i)] = std::exp(-((i - c) * (i - c)) / (2.0 * p.sigma * p.sigma));
        gsum += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= gsum;

    const int OH = H - win + 1, OW = W - win + 1;
    auto filter = [&](auto&& value_at) {
        // Horizontal pass into {H, OW}, then vertical into {OH, OW}.
        std::vector<double> tmp(static_cast<std::size_t>(H) * OW);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < OW; ++x) {
                double acc = 0.0;
                for (int k = 0; k < win; ++k) acc += g[static_cast<std::size_t>(k)] * value_at(y, x + k);
                tmp[static_cast<std::size_t>(y) * OW + x] = acc;
            }
        std::vector<double> out(static_cast<std::size_t>(OH) * OW);
        for (int y = 0; y < OH; ++y)
            for (int x = 0; x < OW; ++x) {
                double acc = 0.0;
                for (int k = 0; k < win; ++k)
                    acc += g[static_cast<std::size_t>(k)] * tmp[static_cast<std::size_t>(y + k) * OW + x];
                out[static_cast<std::size_t>(y) * OW + x] = acc;
            }
        return out;
    };

    const auto mu_x = filter([&](int y, int x) { return reference.at(y, x); });
    const auto mu_y = filter([&](int y, int x) { return test.at(y, x); });
    const auto xx = filter([&](int y, int x) { return reference.at(y, x) * reference.at(y, x); });
    const auto yy = filter([&](int y, int x) { return test.at(y, x) * test.at(y, x); });
    const auto xy = filter([&](int y, int x) { return reference.at(y, x) * test.at(y, x); });

    const double c1 = (p.k1 * p.max_value) * (p.k1 * p.max_value);
    const double c2 = (p.k2 * p.max_value) * (p.k2 * p.max_value);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i], my = mu_y[i];
        const double vx = xx[i] - mx * mx;
        const double vy = yy[i] - my * my;
        const double vxy = xy[i] - mx * my;
        acc += ((2.0 * mx * my + c1) * (2.0 * vxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return acc / static_cast<double>(mu_x.size());
}

double perceptual_metric(const Tensor& reference, const Tensor& test,
                         const loss::PerceptualConfig& config,
                         const loss::FeatureExtractor& extractor) {
    auto as_chw = [](const Tensor& t) {
        if (t.ndim() == 3) return t;
        if (t.ndim() != 2) throw ShapeMismatch("perceptual_metric: expected {H,W} or {1,H,W}");
        return Tensor({1, t.dim(0), t.dim(1)}, t.vec());
    };
    const ag::Var a = ag::constant(as_chw(reference));
    const ag::Var b = ag::constant(as_chw(test));
    return loss::perceptual_loss(a, b, config, extractor)->scalar();
}

std::vector<std::int64_t> roi_indices(const Tensor& image, const ROISpec& roi) {
    if (image.ndim() != 2) throw ShapeMismatch("roi: expected {H,W} image");
    const int H = image.dim(0), W = image.dim(1);
    const double r = roi.radius_px;
    if (roi.center_row - r < 0 || roi.center_row + r > H || roi.center_col - r < 0 ||
        roi.center_col + r > W)
        throw ConfigError("roi: circle not fully inside image bounds");
    std::vector<std::int64_t> idx;
    const int lo_r = std::max(0, roi.center_row - roi.radius_px - 1);
    const int hi_r = std::min(H - 1, roi.center_row + roi.radius_px);
    const int lo_c = std::max(0, roi.center_col - roi.radius_px - 1);
    const int hi_c = std::min(W - 1, roi.center_col + roi.radius_px);
    for (int y = lo_r; y <= hi_r; ++y)
        for (int x = lo_c; x <= hi_c; ++x) {
            const double dy = y + 0.5 - roi.center_row;
            const double dx = x + 0.5 - roi.center_col;
            if (dy * dy + dx * dx <= r * r) idx.push_back(static_cast<std::int64_t>(y) * W + x);
        }
    if (idx.empty()) throw ConfigError("roi: no pixels selected");
    return idx;
}

namespace {

void roi_stats(const Tensor& image, const std::vector<std::int64_t>& idx, double& mean, double& stddev) {
    double mu = 0.0;
    for (auto i : idx) mu += image[i];
    mu /= static_cast<double>(idx.size());
    double var = 0.0;
    for (auto i : idx) {
        const double d = image[i] - mu;
        var += d * d;
    }
    var /= static_cast<double>(idx.size());
    mean = mu;
    stddev = std::sqrt(var);
}

} // namespace

double snr(const Tensor& image, const ROISpec& roi) {
    const auto idx = roi_indices(image, roi);
    double mu, sd;
    roi_stats(image, idx, mu, sd);
    if (sd == 0.0) throw ZeroVariance("snr: ROI has zero variance");
    return mu / sd;
}

double cnr(const Tensor& image, const ROISpec& roi_signal, const ROISpec& roi_background) {
    const auto sig = roi_indices(image, roi_signal);
    const auto bg = roi_indices(image, roi_background);
    for (auto i : sig)
        if (std::find(bg.begin(), bg.end(), i) != bg.end())
            throw OverlappingROIs("cnr: signal and background ROIs overlap");
    double mu_s, sd_s, mu_b, sd_b;
    roi_stats(image, sig, mu_s, sd_s);
    roi_stats(image, bg, mu_b, sd_b);
    if (sd_b == 0.0) throw ZeroVariance("cnr: background ROI has zero variance");
    return std::fabs(mu_s - mu_b) / sd_b;
}

namespace {

Aggregate aggregate_of(const std::vector<double>& values) {
    Aggregate a;
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return a;
}

} // namespace

MetricsReport evaluate_report(const std::vector<EvalItem>& items, const EvalConfig& config) {
    if (items.empty()) throw EmptyDataset("evaluate_report: no image pairs");
    const auto extractor = loss::make_extractor(config.perceptual.extractor_id);

    MetricsReport report;
    report.window_note = config.window_note;
    if (config.roi_signal) report.rois.push_back(*config.roi_signal);
    if (config.roi_background) report.rois.push_back(*config.roi_background);

    std::vector<double> psnrs, ssims, pls, snrs, cnrs;
    for (const auto& item : items) {
        MetricsRow row;
        row.id = item.id;
        row.psnr_db = psnr(item.reference, item.test, config.max_value);
        SsimParams sp = config.ssim_params;
        sp.max_value = config.max_value;
        row.ssim_value = ssim(item.reference, item.test, sp);
        const Tensor ref_n = ctio::normalize_for_model(item.reference, config.norm_lo, config.norm_hi);
        const Tensor test_n = ctio::normalize_for_model(item.test, config.norm_lo, config.norm_hi);
        row.pl = perceptual_metric(ref_n, test_n, config.perceptual, *extractor);
        const Tensor& roi_image = item.test_hu ? *item.test_hu : item.test;
        if (config.roi_signal) {
            row.snr_value = snr(roi_image, *config.roi_signal);
            snrs.push_back(*row.snr_value);
        }
        if (config.roi_signal && config.roi_background) {
            row.cnr_value = cnr(roi_image, *config.roi_signal, *config.roi_background);
            cnrs.push_back(*row.cnr_value);
        }
        psnrs.push_back(row.psnr_db);
        ssims.push_back(row.ssim_value);
        pls.push_back(row.pl);
        report.rows.push_back(std::move(row));
    }
    report.psnr_agg = aggregate_of(psnrs);
    report.ssim_agg = aggregate_of(ssims);
    report.pl_agg = aggregate_of(pls);
    if (!snrs.empty()) report.snr_agg = aggregate_of(snrs);
    if (!cnrs.empty()) report.cnr_agg = aggregate_of(cnrs);
    return report;
}

std::string MetricsReport::table() const {
    std::ostringstream os;
    if (!window_note.empty()) os << "# " << window_note << "\n";
    os << "image                      PSNR      SSIM        PL";
    const bool with_snr = snr_agg.has_value();
    const bool with_cnr = cnr_agg.has_value();
    if (with_snr) os << "       SNR";
    if (with_cnr) os << "       CNR";
    os << "\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-22s %9.3f %9.4f %9.4f", r.id.c_str(), r.psnr_db,
                      r.ssim_value, r.pl);
        os << buf;
        if (with_snr) {
            std::snprintf(buf, sizeof buf, " %9.3f", r.snr_value.value_or(0.0));
            os << buf;
        }
        if (with_cnr) {
            std::snprintf(buf, sizeof buf, " %9.3f", r.cnr_value.value_or(0.0));
            os << buf;
        }
        os << "\n";
    }
    std::snprintf(buf, sizeof buf, "%-22s %9.3f %9.4f %9.4f", "mean", psnr_agg.mean, ssim_agg.mean,
                  pl_agg.mean);
    os << buf;
    if (with_snr) {
        std::snprintf(buf, sizeof buf, " %9.3f", snr_agg->mean);
        os << buf;
    }
    if (with_cnr) {
        std::snprintf(buf, sizeof buf, " %9.3f", cnr_agg->mean);
        os << buf;
    }
    os << "\n";
    std::snprintf(buf, sizeof buf, "%-22s %9.3f %9.4f %9.4f", "stddev", psnr_agg.stddev,
                  ssim_agg.stddev, pl_agg.stddev);
    os << buf;
    if (with_snr) {
        std::snprintf(buf, sizeof buf, " %9.3f", snr_agg->stddev);
        os << buf;
    }
    if (with_cnr) {
        std::snprintf(buf, sizeof buf, " %9.3f", cnr_agg->stddev);
        os << buf;
    }
    os << "\n";
    return os.str();
}

void MetricsReport::write_jsonl(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("write_jsonl: cannot open " + path);
    for (const auto& r : rows) {
        nlohmann::json j{{"id", r.id}, {"psnr", r.psnr_db}, {"ssim", r.ssim_value}, {"pl", r.pl}};
        if (r.snr_value) j["snr"] = *r.snr_value;
        if (r.cnr_value) j["cnr"] = *r.cnr_value;
        out << j.dump() << "\n";
    }
    nlohmann::json agg{{"id", "_aggregate"},
                       {"psnr_mean", psnr_agg.mean},
                       {"psnr_std", psnr_agg.stddev},
                       {"ssim_mean", ssim_agg.mean},
                       {"ssim_std", ssim_agg.stddev},
                       {"pl_mean", pl_agg.mean},
                       {"pl_std", pl_agg.stddev}};
    if (snr_agg) {
        agg["snr_mean"] = snr_agg->mean;
        agg["snr_std"] = snr_agg->stddev;
    }
    if (cnr_agg) {
        agg["cnr_mean"] = cnr_agg->mean;
        agg["cnr_std"] = cnr_agg->stddev;
    }
    if (!window_note.empty()) agg["note"] = window_note;
    out << agg.dump() << "\n";
}

} // namespace ldct::metrics
