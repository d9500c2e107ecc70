#include "wavelab/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "wavelab/fft.hpp"
#include "wavelab/kernels.hpp"
#include "wavelab/montecarlo.hpp"

namespace wavelab {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

// QAM symbol vectors as packed columns (2M x count).
Mat draw_symbol_columns(int m, int order, std::size_t count, SeededRng& rng) {
    Mat s(2 * m, static_cast<Eigen::Index>(count));
    const int k = qam_bits_per_symbol(order);
    for (std::size_t c = 0; c < count; ++c) {
        const ComplexVec sym = qam_modulate(rng.bits(static_cast<std::size_t>(m * k)), order);
        for (int i = 0; i < m; ++i) {
            s(i, static_cast<Eigen::Index>(c)) = sym[static_cast<std::size_t>(i)].real();
            s(m + i, static_cast<Eigen::Index>(c)) = sym[static_cast<std::size_t>(i)].imag();
        }
    }
    return s;
}

Mat random_weights(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    Mat w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = scale * rng.normal();
    return w;
}

/// The noise-free two-stage chain between the stage-1 output and the
/// receiver-side truncation, run literally (padding, shift, IFFT, AWGN, FFT,
/// truncation). Returns Y = Xa + packed noise; the linear part of the chain
/// is the identity, which the backward pass relies on.
struct Stage2Channel {
    int q, n, m, order;
    double ebn0_lin;
    std::vector<std::size_t> bin_map;  // payload position -> natural FFT bin

    Stage2Channel(int q_, int n_, int m_, int order_, double ebn0_db)
        : q(q_), n(n_), m(m_), order(order_), ebn0_lin(db_to_linear(ebn0_db)) {
        const int start = (n - q) / 2;
        const int unshift = (n + 1) / 2;
        for (int i = 0; i < q; ++i)
            bin_map.push_back(static_cast<std::size_t>((start + i + unshift) % n));
    }

    // xa: 2Q x B stage-1 outputs; returns 2Q x B received vectors.
    Mat run(const Mat& xa, SeededRng& rng) const {
        const Eigen::Index bsz = xa.cols();
        // Eb/N0 bookkeeping against the batch-average block energy.
        const double e_block = xa.squaredNorm() / static_cast<double>(bsz);
        const double sigma2 =
            e_block / (static_cast<double>(m * qam_bits_per_symbol(order)) * ebn0_lin);

        Fft& fft = thread_fft(static_cast<std::size_t>(n));
        Mat y(2 * q, bsz);
        ComplexVec grid(static_cast<std::size_t>(n));
        ComplexVec time(static_cast<std::size_t>(n));
        for (Eigen::Index c = 0; c < bsz; ++c) {
            std::fill(grid.begin(), grid.end(), cplx(0.0, 0.0));
            for (int i = 0; i < q; ++i)
                grid[bin_map[static_cast<std::size_t>(i)]] = cplx(xa(i, c), xa(q + i, c));
            fft.inverse(grid.data(), time.data());
            for (auto& x : time) x += rng.normal_complex(sigma2);
            fft.forward(time.data(), grid.data());
            for (int i = 0; i < q; ++i) {
                const cplx v = grid[bin_map[static_cast<std::size_t>(i)]];
                y(i, c) = v.real();
                y(q + i, c) = v.imag();
            }
        }
        return y;
    }
};

struct DetectedLossGrad {
    double loss = 0.0;  // per-element MSE, for reporting
    Mat d_y0;           // gradient wrt the detector input
    Mat d_c;            // gradient wrt the correlation matrix (diagonal zeroed)
};

/// Unrolled soft-limited cancellation recursion with exact backpropagation.
/// s(k) = y0 - O * limit(s(k-1)); gradients flow through the active (not
/// limited) entries only.
DetectedLossGrad detected_loss(const Mat& y0, const Mat& target, const Mat& offdiag,
                               double clamp, int unroll) {
    const Eigen::Index dim = y0.rows(), bsz = y0.cols();
    std::vector<Mat> states;
    states.reserve(static_cast<std::size_t>(unroll) + 1);
    states.push_back(y0);
    Mat limited(dim, bsz), next(dim, bsz);
    for (int k = 0; k < unroll; ++k) {
        limited = states.back().cwiseMax(-clamp).cwiseMin(clamp);
        kernels::gemm_nn(offdiag, limited, next, -1.0, 0.0);
        next += y0;
        states.push_back(next);
    }

    DetectedLossGrad out;
    const Mat err = states.back() - target;
    const double denom = static_cast<double>(dim) * static_cast<double>(bsz);
    out.loss = err.squaredNorm() / denom;

    // d(loss)/d(final state), with the batch-mean (not per-element) scaling
    // actually used for the SGD step.
    Mat g = err * (2.0 / static_cast<double>(bsz));
    out.d_y0 = Mat::Zero(dim, bsz);
    out.d_c = Mat::Zero(dim, dim);
    Mat du(dim, bsz);
    for (int k = unroll; k >= 1; --k) {
        const Mat& prev = states[static_cast<std::size_t>(k - 1)];
        out.d_y0 += g;
        limited = prev.cwiseMax(-clamp).cwiseMin(clamp);
        kernels::gemm_nt(g, limited, out.d_c, -1.0, 1.0);
        kernels::gemm_tn(offdiag, g, du, -1.0, 0.0);
        g = du.cwiseProduct(
            (prev.cwiseAbs().array() < clamp).matrix().cast<double>());
    }
    out.d_y0 += g;  // s(0) = y0
    out.d_c.diagonal().setZero();
    return out;
}

}  // namespace

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "mse") return LossKind::mse;
    if (name == "mse_detected") return LossKind::mse_detected;
    throw ConfigError("unknown loss kind: " + name);
}

InitKind init_kind_from_name(const std::string& name) {
    if (name == "legacy") return InitKind::legacy;
    if (name == "random") return InitKind::random;
    throw ConfigError("unknown init kind: " + name);
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
    if (iterations < 1) throw ConfigError("iteration count must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (train_symbols < 1) throw ConfigError("training symbol count must be >= 1");
    if (prune_threshold < 0.0 || prune_threshold >= 1.0)
        throw ConfigError("prune threshold must be in [0,1)");
    if (checkpoint_interval < 1) throw ConfigError("checkpoint interval must be >= 1");
    if (detector_iterations < 1) throw ConfigError("detector unroll depth must be >= 1");
}

std::uint64_t TrainConfig::digest() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) { h = fnv1a(p, n, h); };
    mix(&learning_rate, sizeof(learning_rate));
    mix(&iterations, sizeof(iterations));
    mix(&train_symbols, sizeof(train_symbols));
    mix(&batch_size, sizeof(batch_size));
    mix(&seed, sizeof(seed));
    mix(&train_ebn0_db, sizeof(train_ebn0_db));
    mix(&prune_threshold, sizeof(prune_threshold));
    mix(&loss, sizeof(loss));
    mix(&init, sizeof(init));
    mix(&checkpoint_interval, sizeof(checkpoint_interval));
    mix(&detector_iterations, sizeof(detector_iterations));
    return h;
}

TransformPair stage1_learn_legacy(int m, const TrainConfig& cfg) {
    cfg.validate();
    if (m < 2) throw InvalidInput("stage 1 needs at least two symbols per block");
    const Mat target_fw = real_block_of(dft_matrix(m, DftDirection::forward));
    const Mat target_rv = real_block_of(dft_matrix(m, DftDirection::inverse));

    SeededRng rng(SeededRng::derive(cfg.seed, 0x51A6E1));
    Mat wf, wr;
    if (cfg.init == InitKind::legacy) {
        wf = target_fw;
        wr = target_rv;
    } else {
        wf = random_weights(2 * m, 2 * m, rng);
        wr = random_weights(2 * m, 2 * m, rng);
    }
    Vec bf = Vec::Zero(2 * m), br = Vec::Zero(2 * m);

    const std::size_t pool_vectors =
        std::max<std::size_t>(1, static_cast<std::size_t>(cfg.train_symbols) /
                                     static_cast<std::size_t>(m));
    SeededRng data_rng(SeededRng::derive(cfg.seed, 0xDA7A));
    const Mat pool = draw_symbol_columns(m, 4, pool_vectors, data_rng);

    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(cfg.iterations));
    const Eigen::Index bsz = std::min<Eigen::Index>(cfg.batch_size, pool.cols());
    Mat legacy_out(2 * m, bsz), ef(2 * m, bsz), er(2 * m, bsz), grad(2 * m, 2 * m);
    std::size_t cursor = 0;

    for (int it = 0; it < cfg.iterations; ++it) {
        Mat s(2 * m, bsz);
        for (Eigen::Index c = 0; c < bsz; ++c) {
            s.col(c) = pool.col(static_cast<Eigen::Index>(cursor));
            cursor = (cursor + 1) % pool_vectors;
        }
        // supervised emulation: forward learns the precoder output, inverse
        // learns to undo the exact legacy output
        kernels::gemm_nn(target_fw, s, legacy_out);
        kernels::gemm_nn(wf, s, ef);
        ef.colwise() += bf;
        ef -= legacy_out;
        kernels::gemm_nn(wr, legacy_out, er);
        er.colwise() += br;
        er -= s;

        const double denom = static_cast<double>(2 * m) * static_cast<double>(bsz);
        const double loss = (ef.squaredNorm() + er.squaredNorm()) / denom;
        curve.push_back(loss);
        if (!std::isfinite(loss)) throw TrainingFailure("stage-1 loss diverged", curve);
        if (loss < 1e-18) break;  // analytic start is already exact

        const double step = cfg.learning_rate * 2.0 / static_cast<double>(bsz);
        kernels::gemm_nt(ef, s, grad);
        wf -= step * grad;
        bf -= step * ef.rowwise().sum();
        kernels::gemm_nt(er, legacy_out, grad);
        wr -= step * grad;
        br -= step * er.rowwise().sum();
    }

    // held-out round-trip check
    SeededRng val_rng(SeededRng::derive(cfg.seed, 0x7E57));
    const Mat sval = draw_symbol_columns(m, 4, 256, val_rng);
    Mat mid(2 * m, sval.cols()), rec(2 * m, sval.cols());
    kernels::gemm_nn(wf, sval, mid);
    mid.colwise() += bf;
    kernels::gemm_nn(wr, mid, rec);
    rec.colwise() += br;
    const double val_mse =
        (rec - sval).squaredNorm() / (static_cast<double>(2 * m) * static_cast<double>(sval.cols()));
    if (val_mse > cfg.stage1_tolerance)
        throw TrainingFailure("stage-1 emulation did not converge (round-trip MSE " +
                                  std::to_string(val_mse) + ")",
                              curve);

    TransformPair pair{LinearTransform(std::move(wf), std::move(bf)),
                       LinearTransform(std::move(wr), std::move(br)), m, m, {}};
    pair.meta.data_symbols = static_cast<std::uint32_t>(m);
    pair.meta.compressed_symbols = static_cast<std::uint32_t>(m);
    pair.meta.seed = cfg.seed;
    pair.meta.config_digest = cfg.digest();
    return pair;
}

std::pair<TransformPair, TrainReport> stage2_compress(const TransformPair& stage1, int q,
                                                      const TrainConfig& cfg,
                                                      const WaveformConfig& wcfg) {
    cfg.validate();
    stage1.validate();
    const int m = stage1.data_symbols;
    if (q >= m) throw InvalidInput("stage 2 requires Q < M");
    if (q < 1) throw InvalidInput("Q must be >= 1");
    if (wcfg.fft_size < q) throw InvalidInput("FFT size must be >= Q");
    const int n = wcfg.fft_size;
    const int order = wcfg.qam_order;
    const auto t0 = std::chrono::steady_clock::now();

    SeededRng rng(SeededRng::derive(cfg.seed, 0x57A6E2));
    Mat wf(2 * q, 2 * m), wr(2 * m, 2 * q);
    if (cfg.init == InitKind::legacy) {
        // keep the stage-1 rows that map to the centre of the occupied band,
        // scaled so the warm start has a unit correlation diagonal (the
        // detector's fixed point then starts at the true symbols)
        const std::vector<int> kept = center_kept_indices(m, q);
        for (int j = 0; j < q; ++j) {
            wf.row(j) = stage1.forward.effective().row(kept[static_cast<std::size_t>(j)]);
            wf.row(q + j) = stage1.forward.effective().row(m + kept[static_cast<std::size_t>(j)]);
        }
        wf *= std::sqrt(static_cast<double>(m) / static_cast<double>(q));
        wr = wf.transpose();
    } else {
        wf = random_weights(2 * q, 2 * m, rng);
        wr = random_weights(2 * m, 2 * q, rng);
    }
    Vec bf = Vec::Zero(2 * q), br = Vec::Zero(2 * m);

    const std::size_t pool_vectors =
        std::max<std::size_t>(1, static_cast<std::size_t>(cfg.train_symbols) /
                                     static_cast<std::size_t>(m));
    SeededRng data_rng(SeededRng::derive(cfg.seed, 0xDA7A));
    const Mat pool = draw_symbol_columns(m, order, pool_vectors, data_rng);

    const Stage2Channel channel(q, n, m, order, cfg.train_ebn0_db);
    const double clamp = qam_axis_limit(order);

    // fixed validation stream (symbols and unit-scale noise draws)
    const std::size_t val_vectors = std::max<std::size_t>(
        16, cfg.validation_bits / static_cast<std::size_t>(m * qam_bits_per_symbol(order)));
    SeededRng val_rng(SeededRng::derive(cfg.seed, 0x7E57));
    const Mat val_s = draw_symbol_columns(m, order, val_vectors, val_rng);
    const std::uint64_t val_noise_seed = SeededRng::derive(cfg.seed, 0x7015E);

    const Eigen::Index bsz = std::min<Eigen::Index>(cfg.batch_size, pool.cols());
    std::size_t cursor = 0;

    TrainReport report;
    report.config_digest = cfg.digest();
    double best_val = std::numeric_limits<double>::infinity();
    Mat best_wf = wf, best_wr = wr;
    Vec best_bf = bf, best_br = br;
    bool stop = false;

    auto validation_mse = [&](const Mat& fw, const Mat& rv, const Vec& fb, const Vec& rb) {
        SeededRng noise_rng(val_noise_seed);
        Mat xa(2 * q, val_s.cols());
        kernels::gemm_nn(fw, val_s, xa);
        xa.colwise() += fb;
        const Mat y = channel.run(xa, noise_rng);
        if (cfg.loss == LossKind::mse) {
            Mat shat(2 * m, val_s.cols());
            kernels::gemm_nn(rv, y, shat);
            shat.colwise() += rb;
            return (shat - val_s).squaredNorm() /
                   (static_cast<double>(2 * m) * static_cast<double>(val_s.cols()));
        }
        Mat c(2 * m, 2 * m);
        kernels::gemm_nn(rv, fw, c);
        Mat offdiag = c;
        offdiag.diagonal().setZero();
        Mat y0(2 * m, val_s.cols());
        Mat ycentered = y;
        ycentered.colwise() -= fb;
        kernels::gemm_nn(rv, ycentered, y0);
        const auto dl = detected_loss(y0, val_s, offdiag, clamp, cfg.detector_iterations);
        return dl.loss;
    };

    auto run_epochs = [&](int iterations, const MaskMatrix* fw_mask, const MaskMatrix* rv_mask,
                          bool with_checkpoints) {
        Mat xa(2 * q, bsz), y(2 * q, bsz), c(2 * m, 2 * m), offdiag(2 * m, 2 * m);
        Mat y0(2 * m, bsz), dwf(2 * q, 2 * m), dwr(2 * m, 2 * q), tmp(2 * q, bsz);
        for (int it = 0; it < iterations && !stop; ++it) {
            Mat s(2 * m, bsz);
            for (Eigen::Index col = 0; col < bsz; ++col) {
                s.col(col) = pool.col(static_cast<Eigen::Index>(cursor));
                cursor = (cursor + 1) % pool_vectors;
            }
            kernels::gemm_nn(wf, s, xa);
            xa.colwise() += bf;
            y = channel.run(xa, rng);

            double loss;
            if (cfg.loss == LossKind::mse) {
                Mat shat(2 * m, bsz);
                kernels::gemm_nn(wr, y, shat);
                shat.colwise() += br;
                Mat err = shat - s;
                loss = err.squaredNorm() /
                       (static_cast<double>(2 * m) * static_cast<double>(bsz));
                const double scale = 2.0 / static_cast<double>(bsz);
                err *= scale;
                kernels::gemm_nt(err, y, dwr);
                br -= cfg.learning_rate * err.rowwise().sum();
                kernels::gemm_tn(wr, err, tmp);  // dY, and dXa = dY exactly
                kernels::gemm_nt(tmp, s, dwf);
                bf -= cfg.learning_rate * tmp.rowwise().sum();
            } else {
                kernels::gemm_nn(wr, wf, c);
                offdiag = c;
                offdiag.diagonal().setZero();
                Mat ycentered = y;
                ycentered.colwise() -= bf;
                kernels::gemm_nn(wr, ycentered, y0);
                const auto dl = detected_loss(y0, s, offdiag, clamp, cfg.detector_iterations);
                loss = dl.loss;
                // dWr via the two paths: y0 = Wr (Y - bf) and C = Wr Wf
                kernels::gemm_nt(dl.d_y0, ycentered, dwr);
                kernels::gemm_nt(dl.d_c, wf, dwr, 1.0, 1.0);
                // dWf via C and via Y (dY = Wr^T d_y0, dXa = dY)
                kernels::gemm_tn(wr, dl.d_y0, tmp);
                kernels::gemm_nt(tmp, s, dwf);
                kernels::gemm_tn(wr, dl.d_c, dwf, 1.0, 1.0);
            }
            report.loss_curve.push_back(loss);
            ++report.iterations_run;
            if (!std::isfinite(loss))
                throw TrainingFailure("stage-2 loss diverged", report.loss_curve);

            if (fw_mask != nullptr) dwf = dwf.cwiseProduct(fw_mask->cast<double>());
            if (rv_mask != nullptr) dwr = dwr.cwiseProduct(rv_mask->cast<double>());
            wf -= cfg.learning_rate * dwf;
            wr -= cfg.learning_rate * dwr;

            if (with_checkpoints && ((it + 1) % cfg.checkpoint_interval == 0)) {
                const double val = validation_mse(wf, wr, bf, br);
                if (val < best_val) {
                    best_val = val;
                    best_wf = wf;
                    best_wr = wr;
                    best_bf = bf;
                    best_br = br;
                    report.best_iteration = report.iterations_run;
                } else {
                    stop = true;  // evaluation gap stopped shrinking
                    report.stopped_early = true;
                }
            }
        }
    };

    // checkpoint 0: the warm start itself is a candidate
    best_val = validation_mse(wf, wr, bf, br);
    run_epochs(cfg.iterations, nullptr, nullptr, true);
    report.best_validation_mse = best_val;

    wf = best_wf;
    wr = best_wr;
    bf = best_bf;
    br = best_br;

    MaskMatrix fw_mask, rv_mask;
    if (cfg.prune_threshold > 0.0) {
        LinearTransform pruned_fw =
            prune(LinearTransform(wf, bf), cfg.prune_threshold);
        LinearTransform pruned_rv =
            prune(LinearTransform(wr, br), cfg.prune_threshold);
        fw_mask = pruned_fw.mask();
        rv_mask = pruned_rv.mask();
        wf = wf.cwiseProduct(fw_mask.cast<double>());
        wr = wr.cwiseProduct(rv_mask.cast<double>());
        stop = false;
        run_epochs(std::max(cfg.iterations / 10, 1), &fw_mask, &rv_mask, false);
    } else {
        fw_mask = MaskMatrix::Ones(2 * q, 2 * m);
        rv_mask = MaskMatrix::Ones(2 * m, 2 * q);
    }

    TransformPair out{LinearTransform(std::move(wf), std::move(bf), fw_mask, Activation::linear),
                      LinearTransform(std::move(wr), std::move(br), rv_mask, Activation::linear),
                      m, q, {}};
    out.meta.data_symbols = static_cast<std::uint32_t>(m);
    out.meta.compressed_symbols = static_cast<std::uint32_t>(q);
    out.meta.fft_size = static_cast<std::uint32_t>(n);
    out.meta.seed = cfg.seed;
    out.meta.config_digest = cfg.digest();
    report.prune_ratio = out.forward.prune_ratio();

    WaveformConfig eval_cfg = wcfg;
    eval_cfg.scheme = Scheme::sc_nofs;
    eval_cfg.data_symbols = m;
    eval_cfg.compressed_symbols = q;
    report.final_ber_gap =
        evaluate_ber_gap(out, eval_cfg, cfg.train_ebn0_db, cfg.validation_bits,
                         SeededRng::derive(cfg.seed, 0xBE6), 0);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(out), std::move(report)};
}

double evaluate_ber_gap(const TransformPair& pair, const WaveformConfig& wcfg, double ebn0_db,
                        std::uint64_t n_bits, std::uint64_t seed, int jobs) {
    BerRunSpec nofs;
    nofs.wf = wcfg;
    nofs.wf.scheme = Scheme::sc_nofs;
    nofs.wf.data_symbols = pair.data_symbols;
    nofs.wf.compressed_symbols = pair.compressed_symbols;
    nofs.pair = &pair;
    nofs.ebn0_db = ebn0_db;
    nofs.target_bits = n_bits;
    nofs.seed = seed;
    nofs.det.qam_order = wcfg.qam_order;

    BerRunSpec ofdm = nofs;
    ofdm.wf.scheme = Scheme::sc_ofdm;
    ofdm.wf.compressed_symbols = ofdm.wf.data_symbols;
    ofdm.pair = nullptr;

    const auto a = run_ber_point(nofs, jobs);
    const auto b = run_ber_point(ofdm, jobs);
    return a.ber() - b.ber();
}

}  // namespace wavelab
