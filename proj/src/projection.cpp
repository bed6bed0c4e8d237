#include "blockclust/projection.hpp"

#include "blockclust/csv.hpp"
#include "blockclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace blockclust {

void TsneConfig::validate() const {
    if (!(perplexity > 0.0))
        throw Error(ErrorKind::InvalidArgument, "perplexity must be positive");
    if (iterations == 0)
        throw Error(ErrorKind::InvalidArgument, "iterations must be positive");
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Per-row parameters of the conditional affinity kernel
// p(j|i) = exp(-beta * (d2(i,j) - shift)) / norm.
struct RowScale {
    double beta = 1.0;
    double shift = 0.0;
    double norm = 1.0;
};

// Shannon entropy (nats) of the row distribution at precision beta; the
// shift stabilizes the exponentials and cancels out of the entropy.
double row_entropy(const std::vector<double>& d2, std::size_t self, double beta, double shift,
                   double* norm_out) {
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < d2.size(); ++j) {
        if (j == self) continue;
        double t = d2[j] - shift;
        double e = std::exp(-beta * t);
        sum += e;
        weighted += t * e;
    }
    *norm_out = sum;
    return std::log(sum) + beta * weighted / sum;
}

RowScale search_beta(const std::vector<double>& d2, std::size_t self, double perplexity) {
    RowScale rs;
    rs.shift = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d2.size(); ++j)
        if (j != self) rs.shift = std::min(rs.shift, d2[j]);

    const double target = std::log(perplexity);
    double beta = 1.0;
    double beta_lo = -std::numeric_limits<double>::infinity();
    double beta_hi = std::numeric_limits<double>::infinity();
    double norm = 0.0;
    double h = row_entropy(d2, self, beta, rs.shift, &norm);
    for (int tries = 0; tries < 50; ++tries) {
        double diff = h - target;
        if (std::abs(diff) <= 1e-5) break;
        if (diff > 0) {
            beta_lo = beta;
            beta = std::isinf(beta_hi) ? beta * 2.0 : (beta + beta_hi) / 2.0;
        } else {
            beta_hi = beta;
            beta = std::isinf(beta_lo) ? beta / 2.0 : (beta + beta_lo) / 2.0;
        }
        h = row_entropy(d2, self, beta, rs.shift, &norm);
    }
    rs.beta = beta;
    rs.norm = norm;
    return rs;
}

// Symmetrized affinities, condensed upper triangle, clamped to 1e-12.
std::vector<double> symmetric_affinities(const std::vector<std::vector<double>>& rows,
                                         double perplexity) {
    const std::size_t n = rows.size();
    std::vector<RowScale> scale(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> d2(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d2[j] = squared_distance(rows[i], rows[j]);
        scale[i] = search_beta(d2, i, perplexity);
    });

    std::vector<double> p(n * (n - 1) / 2, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::size_t base = n * i - i * (i + 1) / 2 - i - 1;
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = squared_distance(rows[i], rows[j]);
            double given_i = std::exp(-scale[i].beta * (d2 - scale[i].shift)) / scale[i].norm;
            double given_j = std::exp(-scale[j].beta * (d2 - scale[j].shift)) / scale[j].norm;
            p[base + j] = std::max((given_i + given_j) / (2.0 * static_cast<double>(n)), 1e-12);
        }
    });
    return p;
}

// First two principal components via power iteration, rescaled so the
// first coordinate has standard deviation 1e-4 (the usual small init).
std::vector<double> pca_init(const std::vector<std::vector<double>>& rows, std::uint64_t seed) {
    const std::size_t n = rows.size();
    const std::size_t dim = rows[0].size();

    std::vector<double> mean(dim, 0.0);
    for (const auto& r : rows)
        for (std::size_t k = 0; k < dim; ++k) mean[k] += r[k];
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<double> cov(dim * dim, 0.0);
    for (const auto& r : rows)
        for (std::size_t a = 0; a < dim; ++a) {
            double da = r[a] - mean[a];
            for (std::size_t b = a; b < dim; ++b) cov[a * dim + b] += da * (r[b] - mean[b]);
        }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < a; ++b) cov[a * dim + b] = cov[b * dim + a];

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto top_component = [&](std::vector<double>& component) {
        std::vector<double> v(dim);
        for (double& x : v) x = gauss(rng);
        std::vector<double> w(dim);
        double lambda = 0.0;
        for (int it = 0; it < 500; ++it) {
            for (std::size_t a = 0; a < dim; ++a) {
                double s = 0.0;
                for (std::size_t b = 0; b < dim; ++b) s += cov[a * dim + b] * v[b];
                w[a] = s;
            }
            double norm = 0.0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-30) break; // covariance (near) zero, direction arbitrary
            double align = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                w[a] /= norm;
                align += w[a] * v[a];
            }
            v = w;
            lambda = norm;
            if (std::abs(std::abs(align) - 1.0) < 1e-14) break;
        }
        component = v;
        return lambda;
    };

    std::vector<double> pc1, pc2;
    double l1 = top_component(pc1);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) cov[a * dim + b] -= l1 * pc1[a] * pc1[b];
    top_component(pc2);

    std::vector<double> y(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double d = rows[i][k] - mean[k];
            c1 += d * pc1[k];
            c2 += d * pc2[k];
        }
        y[2 * i] = c1;
        y[2 * i + 1] = c2;
    }

    double var0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) var0 += y[2 * i] * y[2 * i];
    var0 /= static_cast<double>(n);
    if (var0 > 0.0) {
        double s = 1e-4 / std::sqrt(var0);
        for (double& x : y) x *= s;
    } else {
        for (double& x : y) x = gauss(rng) * 1e-4;
    }
    return y;
}

} // namespace

Projection tsne(const EmbeddingMatrix& matrix, const TsneConfig& cfg,
                std::vector<double>* kl_trace) {
    cfg.validate();
    const std::size_t n = matrix.rows.size();
    if (static_cast<double>(n) < 3.0 * cfg.perplexity)
        throw Error(ErrorKind::TooFewPoints,
                    "need at least 3*perplexity points, got " + std::to_string(n));
    if (n > 20000)
        throw Error(ErrorKind::InvalidArgument, "exact projection is capped at 20000 points");

    Projection out;
    out.block_ids.reserve(n);
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (const auto& [id, row] : matrix.rows) {
        out.block_ids.push_back(id);
        rows.push_back(row);
    }

    std::vector<double> p = symmetric_affinities(rows, cfg.perplexity);
    const auto pair_index = [n](std::size_t i, std::size_t j) {
        return n * i - i * (i + 1) / 2 + (j - i - 1);
    };

    const std::size_t exagg_end = std::min<std::size_t>(250, cfg.iterations);
    const double exaggeration = 12.0;
    for (double& v : p) v *= exaggeration;

    // Constant parts of KL = sum p log p - sum p log num + log(Z) sum p,
    // refreshed when the exaggeration comes off.
    double plogp = 0.0, psum = 0.0;
    auto refresh_constants = [&] {
        plogp = 0.0;
        psum = 0.0;
        for (double v : p) {
            plogp += v * std::log(v);
            psum += v;
        }
        plogp *= 2.0;
        psum *= 2.0;
    };
    refresh_constants();

    std::vector<double> y = pca_init(rows, cfg.seed);
    std::vector<double> velocity(2 * n, 0.0);
    std::vector<double> gains(2 * n, 1.0);
    std::vector<double> grad(2 * n, 0.0);
    std::vector<double> zpart(n, 0.0);
    std::vector<double> klpart(n, 0.0);

    double eta = cfg.learning_rate > 0.0
                     ? cfg.learning_rate
                     : std::max(static_cast<double>(n) / 48.0, 50.0);

    auto recenter = [&] {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += y[2 * i];
            my += y[2 * i + 1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= mx;
            y[2 * i + 1] -= my;
        }
    };

    // One O(n^2) sweep: Z, then gradient and the p*log(num) sum.
    auto evaluate = [&]() -> double {
        parallel_for(n, [&](std::size_t i) {
            double s = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = y[2 * i] - y[2 * j];
                double dy = y[2 * i + 1] - y[2 * j + 1];
                s += 1.0 / (1.0 + dx * dx + dy * dy);
            }
            zpart[i] = s;
        });
        double z = 0.0;
        for (double v : zpart) z += v;
        z *= 2.0;

        parallel_for(n, [&](std::size_t i) {
            double gx = 0.0, gy = 0.0, kl = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double dx = y[2 * i] - y[2 * j];
                double dy = y[2 * i + 1] - y[2 * j + 1];
                double num = 1.0 / (1.0 + dx * dx + dy * dy);
                double pij = j > i ? p[pair_index(i, j)] : p[pair_index(j, i)];
                double mult = 4.0 * (pij - num / z) * num;
                gx += mult * dx;
                gy += mult * dy;
                if (j > i) kl += pij * std::log(num);
            }
            grad[2 * i] = gx;
            grad[2 * i + 1] = gy;
            klpart[i] = kl;
        });
        double plognum = 0.0;
        for (double v : klpart) plognum += v;
        return plogp - 2.0 * plognum + std::log(z) * psum;
    };

    std::vector<double> y_accepted;
    double kl_accepted = std::numeric_limits<double>::infinity();

    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        if (t == exagg_end && t > 0) {
            for (double& v : p) v /= exaggeration;
            refresh_constants();
            kl_accepted = std::numeric_limits<double>::infinity();
        }

        double kl = evaluate();
        if (t >= exagg_end) {
            if (kl > kl_accepted) {
                // The last step raised the objective: roll it back and
                // retry from the accepted point with a smaller step.
                y = y_accepted;
                std::fill(velocity.begin(), velocity.end(), 0.0);
                std::fill(gains.begin(), gains.end(), 1.0);
                eta *= 0.5;
                continue;
            }
            kl_accepted = kl;
            y_accepted = y;
            if (kl_trace) kl_trace->push_back(kl);
        }

        double momentum = t < 250 ? 0.5 : 0.8;
        for (std::size_t c = 0; c < 2 * n; ++c) {
            bool sign_diff = (grad[c] > 0.0) != (velocity[c] > 0.0);
            gains[c] = sign_diff ? gains[c] + 0.2 : gains[c] * 0.8;
            if (gains[c] < 0.01) gains[c] = 0.01;
            velocity[c] = momentum * velocity[c] - eta * gains[c] * grad[c];
            y[c] += velocity[c];
        }
        recenter();
    }

    // The final step was never checked against the objective.
    if (!y_accepted.empty()) {
        double kl = evaluate();
        if (kl > kl_accepted)
            y = y_accepted;
        else if (kl_trace)
            kl_trace->push_back(kl);
    }

    out.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.coords[i] = {y[2 * i], y[2 * i + 1]};
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_svg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = 10;
constexpr std::size_t kShapeCount = 5;
constexpr const char* kUnlabeledColor = "#999999";

// shape 0 circle, 1 square, 2 triangle, 3 diamond, 4 cross
std::string svg_marker(std::size_t shape, double x, double y, const std::string& color,
                       const std::string& cls) {
    const std::string sx = format_svg(x);
    const std::string sy = format_svg(y);
    switch (shape % kShapeCount) {
    case 0:
        return "<circle cx=\"" + sx + "\" cy=\"" + sy + "\" r=\"3.5\"" + " fill=\"" + color +
               "\" class=\"" + cls + "\"/>";
    case 1:
        return "<rect x=\"" + format_svg(x - 3.2) + "\" y=\"" + format_svg(y - 3.2) +
               "\" width=\"6.4\" height=\"6.4\"" + " fill=\"" + color + "\" class=\"" + cls +
               "\"/>";
    case 2:
        return "<polygon points=\"" + format_svg(x) + "," + format_svg(y - 4.2) + " " +
               format_svg(x - 3.8) + "," + format_svg(y + 3.2) + " " + format_svg(x + 3.8) + "," +
               format_svg(y + 3.2) + "\"" + " fill=\"" + color + "\" class=\"" + cls + "\"/>";
    case 3:
        return "<polygon points=\"" + sx + "," + format_svg(y - 4.5) + " " + format_svg(x + 4.5) +
               "," + sy + " " + sx + "," + format_svg(y + 4.5) + " " + format_svg(x - 4.5) + "," +
               sy + "\"" + " fill=\"" + color + "\" class=\"" + cls + "\"/>";
    default:
        return "<path d=\"M " + format_svg(x - 3.5) + " " + format_svg(y - 3.5) + " L " +
               format_svg(x + 3.5) + " " + format_svg(y + 3.5) + " M " + format_svg(x - 3.5) +
               " " + format_svg(y + 3.5) + " L " + format_svg(x + 3.5) + " " +
               format_svg(y - 3.5) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\" fill=\"none\" class=\"" + cls + "\"/>";
    }
}

} // namespace

void export_plot(const std::vector<ProjectedPoint>& points,
                 const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
                 const std::string& manifest_digest) {
    {
        std::ofstream csv(csv_path);
        if (!csv) throw Error(ErrorKind::IoError, "cannot write " + csv_path.string());
        if (!manifest_digest.empty()) csv << "# manifest=" << manifest_digest << "\n";
        csv << "block_id,x,y,label\n";
        for (const auto& pt : points)
            csv << csv::escape(pt.block_id) << ',' << format_double(pt.x) << ','
                << format_double(pt.y) << ',' << csv::escape(pt.label) << "\n";
        if (!csv.good()) throw Error(ErrorKind::IoError, "write failed: " + csv_path.string());
    }

    // Style index per label, labeled names first in sorted order, the
    // empty label pinned to the reserved gray style.
    std::set<std::string> label_names;
    bool has_unlabeled = false;
    for (const auto& pt : points) {
        if (pt.label.empty())
            has_unlabeled = true;
        else
            label_names.insert(pt.label);
    }
    std::map<std::string, std::size_t> style_of;
    for (const auto& name : label_names) style_of.emplace(name, style_of.size());

    auto style_color = [&](const std::string& label) -> std::string {
        if (label.empty()) return kUnlabeledColor;
        return kPalette[style_of[label] % kPaletteSize];
    };
    auto style_shape = [&](const std::string& label) -> std::size_t {
        if (label.empty()) return 0;
        return (style_of[label] / kPaletteSize) % kShapeCount;
    };

    const double width = 1000.0, height = 640.0;
    const double plot_x0 = 50.0, plot_x1 = 780.0;
    const double plot_y0 = 30.0, plot_y1 = 610.0;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& pt : points) {
        xmin = std::min(xmin, pt.x);
        xmax = std::max(xmax, pt.x);
        ymin = std::min(ymin, pt.y);
        ymax = std::max(ymax, pt.y);
    }
    if (points.empty()) xmin = xmax = ymin = ymax = 0.0;
    double xpad = (xmax - xmin) * 0.05, ypad = (ymax - ymin) * 0.05;
    if (xpad == 0.0) xpad = 1.0;
    if (ypad == 0.0) ypad = 1.0;
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) { return plot_x0 + (x - xmin) / (xmax - xmin) * (plot_x1 - plot_x0); };
    auto sy = [&](double y) { return plot_y1 - (y - ymin) / (ymax - ymin) * (plot_y1 - plot_y0); };

    std::ofstream svg(svg_path);
    if (!svg) throw Error(ErrorKind::IoError, "cannot write " + svg_path.string());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    if (!manifest_digest.empty()) svg << "<!-- manifest=" << manifest_digest << " -->\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    svg << "<rect x=\"" << plot_x0 << "\" y=\"" << plot_y0 << "\" width=\"" << plot_x1 - plot_x0
        << "\" height=\"" << plot_y1 - plot_y0
        << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

    for (const auto& pt : points)
        svg << svg_marker(style_shape(pt.label), sx(pt.x), sy(pt.y), style_color(pt.label),
                          "mark")
            << "\n";

    double ly = plot_y0 + 10.0;
    const double lx = 800.0;
    auto legend_entry = [&](const std::string& label, const std::string& shown) {
        svg << "<g class=\"legend-entry\">"
            << svg_marker(style_shape(label), lx, ly, style_color(label), "legend-mark")
            << "<text x=\"" << lx + 12.0 << "\" y=\"" << ly + 4.0
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(shown)
            << "</text></g>\n";
        ly += 22.0;
    };
    for (const auto& name : label_names) legend_entry(name, name);
    if (has_unlabeled) legend_entry("", "unlabeled");

    svg << "</svg>\n";
    if (!svg.good()) throw Error(ErrorKind::IoError, "write failed: " + svg_path.string());
}

} // namespace blockclust
