// SPDX-License-Identifier: Apache-2.0
//
// mtfcma - sub-structure characteristic modes of microstrip antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mtfcma/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <omp.h>
#include <spdlog/spdlog.h>

#include "mtfcma/cma.hpp"
#include "mtfcma/errors.hpp"
#include "mtfcma/fixtures.hpp"
#include "mtfcma/postproc.hpp"
#include "mtfcma/reference.hpp"

namespace mtfcma
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

json mesh_stats(const Structure& st)
{
    const auto& m = st.mesh();
    const auto& b = st.basis();
    json j;
    j["vertices"] = m.vertices().size();
    j["triangles"] = {{"radiator", m.count(SurfaceRole::Radiator)},
                      {"ground", m.count(SurfaceRole::Ground)},
                      {"dielectric", m.count(SurfaceRole::Dielectric)}};
    j["unknowns"] = {{"Jd", b.size(UnknownGroup::Jd)},
                     {"Md", b.size(UnknownGroup::Md)},
                     {"Jg", b.size(UnknownGroup::Jg)},
                     {"Jr", b.size(UnknownGroup::Jr)},
                     {"total", b.total()}};
    j["average_edge_length_m"] = m.average_edge_length();
    j["dielectric_components"] = m.dielectric_components();
    j["coincident_pairs"] = st.coincidence().pairs.size();
    j["touching_pairs"] = st.assembler().touching_pair_count();
    j["near_pairs"] = st.assembler().near_pair_count();
    return j;
}

json resolved(const RunConfig& c)
{
    json j;
    j["mesh"] = {{"path", c.mesh_path.string()}, {"scale", c.mesh_scale}};
    for (const auto& [k, v] : c.tags)
        j["mesh"]["tags"][k] = std::string(to_string(v));
    j["media"] = {{"eps_r", c.media.interior.eps_r}, {"mu_r", c.media.interior.mu_r}};
    j["frequency"] = {{"start", c.f_start}, {"stop", c.f_stop}, {"step", c.f_step}, {"single", c.f_single}};
    j["cma"] = {{"modes", c.mode_count}, {"rank_tol", c.rank_tol}, {"candidates", c.candidates}};
    j["assembly"] = {{"regular_degree", c.assembly.regular_degree},
                     {"near_degree", c.assembly.near_degree},
                     {"singular_order", c.assembly.singular_order},
                     {"close_order", c.assembly.close_order},
                     {"near_factor", c.assembly.near_factor}};
    j["run"] = {{"threads", c.threads}, {"out", c.out_dir.string()}};
    const auto& w = c.scatter.wave;
    j["scatter"] = {{"direction", {w.direction.x(), w.direction.y(), w.direction.z()}},
                    {"polarization", {w.polarization.x(), w.polarization.y(), w.polarization.z()}},
                    {"amplitude", w.amplitude.real()},
                    {"theta_step", c.scatter.theta_step_deg},
                    {"phi", c.scatter.phi_deg}};
    return j;
}

void write_manifest(const fs::path& out, const std::string& command, const RunConfig& c, const json& mesh,
                    const json& timings, const std::vector<std::string>& outputs)
{
    json m;
    m["tool"] = "mtfcma";
    m["version"] = tool_version;
    m["command"] = command;
    m["config_path"] = c.config_path.string();
    m["config"] = c.raw;
    m["resolved"] = resolved(c);
    m["threads"] = omp_get_max_threads();
    m["mesh"] = mesh;
    m["timings_s"] = timings;
    m["outputs"] = outputs;
    const fs::path p = out / "manifest.json";
    std::ofstream f(p);
    if (!f)
        throw IoError("cannot write " + p.string());
    f << m.dump(2) << '\n';
}

Structure load_structure(const RunConfig& c)
{
    if (!fs::exists(c.mesh_path))
        throw IoError("mesh file not found: " + c.mesh_path.string());
    TaggedMesh mesh = load_mesh(c.mesh_path, c.tags, c.mesh_scale);
    return Structure(std::move(mesh), c.assembly);
}

std::string frequency_tag(double f)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << f / 1e9 << "GHz";
    return os.str();
}

void prepare_out(const fs::path& out)
{
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec)
        throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
}

double l2_relative(const std::vector<double>& a, const std::vector<double>& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

} // namespace

void configure_logging(bool quiet)
{
    auto level = spdlog::level::info;
    if (const char* env = std::getenv("MTFCMA_LOG"))
    {
        const std::string v = env;
        if (v == "error")
            level = spdlog::level::err;
        else if (v == "warn")
            level = spdlog::level::warn;
        else if (v == "info")
            level = spdlog::level::info;
        else if (v == "debug")
            level = spdlog::level::debug;
        else
            spdlog::warn("MTFCMA_LOG='{}' not recognised; using info", v);
    }
    if (quiet)
        level = spdlog::level::err;
    spdlog::set_level(level);
    spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
}

void apply_threads(int threads)
{
    if (threads > 0)
        omp_set_num_threads(threads);
    Eigen::setNbThreads(threads > 0 ? threads : omp_get_max_threads());
}

// ---------------------------------------------------------------------------

void run_sweep(const RunConfig& c, const fs::path& out)
{
    prepare_out(out);
    json timings;
    auto t0 = Clock::now();
    const Structure st = load_structure(c);
    timings["setup"] = seconds_since(t0);
    const json stats = mesh_stats(st);
    spdlog::info("mesh: {} triangles, {} unknowns ({} accessible), average edge {:.3g} mm",
                 st.mesh().triangles().size(), st.basis().total(), st.basis().accessible_size(),
                 1e3 * st.mesh().average_edge_length());
    if (st.basis().accessible_size() == 0)
        throw ConfigError("config key 'mesh.tags': no radiator surface (accessible region) is mapped");

    const auto freqs = c.frequencies();
    SweepOptions so;
    so.mode_count = c.mode_count;
    so.rank_tol = c.rank_tol;
    so.candidates = c.candidates;
    t0 = Clock::now();
    const SweepResult res = sweep(st, c.media, freqs, so, [&](std::size_t i, std::size_t n, const SweepSample& s) {
        if (s.ok)
            spdlog::info("[{}/{}] {:.6g} GHz: rank {}, lambda_1 {:.5g}, asymmetry {:.2e}", i, n, s.frequency / 1e9,
                         s.modes.rank, s.modes.lambda.size() ? s.modes.lambda(0) : 0.0, s.asymmetry);
        else
            spdlog::warn("[{}/{}] sample failed: {}", i, n, s.error);
    });
    timings["sweep"] = seconds_since(t0);
    for (const auto& link : res.links)
        for (std::size_t a = 0; a < link.next.size() && a < static_cast<std::size_t>(c.mode_count); ++a)
            if (link.next[a] >= 0 && link.correlation[a] < 0.5)
                spdlog::debug("weak tracking link {}->{} index {}: correlation {:.3f}", link.from, link.to, a,
                              link.correlation[a]);

    std::vector<std::string> outputs{"ms.csv", "resonances.csv", "ms.svg"};
    write_ms_csv(res, c.mode_count, out / "ms.csv");
    write_resonances_csv(res, out / "resonances.csv");
    write_ms_svg(res, c.mode_count, out / "ms.svg");
    for (const auto& r : res.resonances)
    {
        spdlog::info("mode {} resonance at {:.6g} GHz (lambda {:.4g})", r.mode_id, r.frequency / 1e9, r.lambda);
        const auto& sample = res.samples[static_cast<std::size_t>(r.sample)];
        const int idx = res.tracked[static_cast<std::size_t>(r.mode_id - 1)].index[static_cast<std::size_t>(r.sample)];
        const CVector I = sample.modes.vectors.col(idx).cast<Complex>();
        const auto map = eigencurrent_map(st.mesh(), st.basis(), UnknownGroup::Jr, I);
        const std::string name = "mode_" + std::to_string(r.mode_id) + "_" + frequency_tag(r.frequency) + ".vtk";
        write_vtk(st.mesh(), map, out / name, "Jr_magnitude");
        outputs.push_back(name);
    }
    int failed = 0;
    for (const auto& s : res.samples)
        failed += s.ok ? 0 : 1;
    if (failed)
        spdlog::warn("{} of {} samples failed; gaps are written as nan", failed, res.samples.size());
    write_manifest(out, "sweep", c, stats, timings, outputs);
}

void run_scatter(const RunConfig& c, const fs::path& out)
{
    prepare_out(out);
    json timings;
    auto t0 = Clock::now();
    const Structure st = load_structure(c);
    timings["setup"] = seconds_since(t0);
    const double f = c.f_single > 0.0 ? c.f_single : c.f_start;
    spdlog::info("scatter at {:.6g} GHz, {} unknowns", f / 1e9, st.basis().total());
    t0 = Clock::now();
    const BlockedSystem sys = assemble_system(st, c.media, f);
    timings["assembly"] = seconds_since(t0);
    t0 = Clock::now();
    const Excitation exc = assemble_excitation(st.mesh(), st.basis(), c.scatter.wave, f);
    const CurrentSolution sol = solve_driven(sys, exc);
    timings["solve"] = seconds_since(t0);
    spdlog::info("relative residual {:.2e}, rcond {:.2e}", sol.residual, sol.rcond);

    const FarFieldGrid grid{FarFieldGrid::cuts(c.scatter.theta_step_deg).theta_deg, c.scatter.phi_deg};
    const FarFieldPattern pat = far_field(st.mesh(), st.basis(), sol, f, grid);
    write_rcs_csv(grid, rcs(pat, c.scatter.wave.amplitude), out / "rcs.csv");
    write_far_field_csv(pat, out / "far_field.csv");
    write_manifest(out, "scatter", c, mesh_stats(st), timings, {"rcs.csv", "far_field.csv"});
}

void run_modes(const RunConfig& c, const fs::path& out)
{
    prepare_out(out);
    json timings;
    auto t0 = Clock::now();
    const Structure st = load_structure(c);
    timings["setup"] = seconds_since(t0);
    if (st.basis().accessible_size() == 0)
        throw ConfigError("config key 'mesh.tags': no radiator surface (accessible region) is mapped");
    const double f = c.f_single > 0.0 ? c.f_single : c.f_start;
    t0 = Clock::now();
    const BlockedSystem sys = assemble_system(st, c.media, f);
    const SchurOperator op = schur(sys);
    const ModeSolution modes = eig_modes(op, c.rank_tol, c.mode_count);
    timings["modes"] = seconds_since(t0);
    spdlog::info("{:.6g} GHz: retained rank {}, asymmetry {:.2e}", f / 1e9, modes.rank, op.asymmetry);

    std::vector<std::string> outputs{"modes.csv"};
    {
        std::ofstream m(out / "modes.csv");
        if (!m)
            throw IoError("cannot write " + (out / "modes.csv").string());
        m << "index,freq_hz,lambda,ms\n";
        for (Eigen::Index n = 0; n < modes.vectors.cols(); ++n)
            m << n + 1 << ',' << format_double(f) << ',' << format_double(modes.lambda(n)) << ','
              << format_double(modes.ms(n)) << '\n';
    }
    const FarFieldGrid grid = FarFieldGrid::cuts(1.0);
    for (Eigen::Index n = 0; n < modes.vectors.cols(); ++n)
    {
        const CVector I2 = modes.vectors.col(n).cast<Complex>();
        const CurrentSolution full = op.z11 ? recover_nonaccessible(sys, *op.z11, I2) : recover_nonaccessible(sys, I2);
        const std::string base = "mode_" + std::to_string(n + 1);
        write_vtk(st.mesh(), eigencurrent_map(st.mesh(), st.basis(), full, UnknownGroup::Jr), out / (base + ".vtk"),
                  "Jr_magnitude");
        write_far_field_csv(far_field(st.mesh(), st.basis(), full, f, grid), out / (base + "_far_field.csv"));
        outputs.push_back(base + ".vtk");
        outputs.push_back(base + "_far_field.csv");
    }
    write_manifest(out, "modes", c, mesh_stats(st), timings, outputs);
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> validation_suite(const AssemblyOptions& assembly)
{
    std::vector<CheckResult> out;
    auto add = [&out](std::string name, double value, double limit, std::string detail = {}) {
        out.push_back({std::move(name), std::isfinite(value) && value < limit, value, limit, std::move(detail)});
    };

    // series self-checks
    {
        const double a = 0.1, f = c0 / (2.0 * pi * a);
        const MieSolution m = mie_dielectric(a, 4.0, f);
        const MieSolution m5 = mie_dielectric(a, 4.0, f, 1.0, m.terms() + 5);
        double d = 0.0;
        for (double th = 0.0; th <= pi + 1e-12; th += pi / 36)
            d = std::max({d, std::abs(m.rcs_e_plane(th) - m5.rcs_e_plane(th)) / m5.rcs_e_plane(0.0),
                          std::abs(m.rcs_h_plane(th) - m5.rcs_h_plane(th)) / m5.rcs_h_plane(0.0)});
        add("mie truncation stability", d, 1e-10);
        add("mie energy balance", std::abs(m.extinction_cross_section() - m.scattering_cross_section()) /
                                      m.scattering_cross_section(), 1e-10);

        const double x = 0.05, fr = x * c0 / (2.0 * pi * a), k = x / a;
        const MieSolution r = mie_dielectric(a, 4.0, fr);
        const double ray = 4.0 * pi * std::pow(k, 4) * std::pow(a, 6) * std::pow((4.0 - 1.0) / (4.0 + 2.0), 2);
        add("mie rayleigh limit", std::abs(r.rcs_h_plane(pi) - ray) / ray, 5e-3);
    }

    // dielectric sphere against the series
    {
        const double a = 0.1, f = c0 / (2.0 * pi * a);
        const Structure st(fixtures::equal_volume_icosphere(a, 5), assembly);
        Media media;
        media.interior = {4.0, 1.0};
        const BlockedSystem sys = assemble_system(st, media, f);
        PlaneWave w;
        w.direction = Vec3::UnitZ();
        w.polarization = Vec3::UnitX();
        const Excitation exc = assemble_excitation(st.mesh(), st.basis(), w, f);
        const CurrentSolution sol = solve_driven(sys, exc);
        add("driven residual", sol.residual, 1e-10);

        std::vector<double> th(181);
        for (int i = 0; i <= 180; ++i)
            th[static_cast<std::size_t>(i)] = i;
        const FarFieldPattern pat = far_field(st.mesh(), st.basis(), sol, f, FarFieldGrid{th, {0.0, 90.0}});
        const RMatrix s = rcs(pat, w.amplitude);
        const RcsCurve ref = mie_dielectric_rcs(a, 4.0, f, th);
        std::vector<double> num, den;
        for (int i = 0; i <= 180; ++i)
        {
            num.push_back(s(i, 0));
            den.push_back(ref.sigma_e[static_cast<std::size_t>(i)]);
            num.push_back(s(i, 1));
            den.push_back(ref.sigma_h[static_cast<std::size_t>(i)]);
        }
        add("sphere rcs vs mie (L2)", l2_relative(num, den), 0.02,
            std::to_string(st.basis().total()) + " unknowns");

        const double sca = scattering_cross_section(st.mesh(), st.basis(), sol, f, w.amplitude);
        const double ext = extinction_cross_section(st.mesh(), st.basis(), sol, w, f);
        add("power balance", std::abs(sca - ext) / ext, 0.01);

        PlaneWave w2;
        w2.direction = Vec3(1.0, 1.0, 0.0).normalized();
        w2.polarization = Vec3::UnitZ();
        const Excitation exc2 = assemble_excitation(st.mesh(), st.basis(), w2, f);
        const CurrentSolution sol2 = solve_driven(sys, exc2);
        const RVector D = sys.sign_flip();
        const CVector v1 = sys.rhs(exc), v2 = sys.rhs(exc2);
        const Complex r12t = (v1.transpose() * D.cast<Complex>().asDiagonal() * sol2.stacked())(0);
        const Complex r21 = (v2.transpose() * D.cast<Complex>().asDiagonal() * sol.stacked())(0);
        add("driven reciprocity", std::abs(r12t - r21) / std::max(std::abs(r12t), std::abs(r21)), 1e-6);
    }

    // matrix identities on a small microstrip
    {
        fixtures::PatchBox pb;
        pb.nx = 10;
        pb.ny = 4;
        pb.ground = true;
        TaggedMesh base = fixtures::patch_on_box(pb);
        const Structure st(std::move(base), assembly);
        const double f = 1.5e9;
        Media media;
        auto rel = [](const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); };
        double l = 0.0, k = 0.0;
        for (int m = 0; m < 2; ++m)
        {
            const Medium& md = m == 0 ? media.exterior : media.interior;
            for (auto [a, b] : {std::pair{SurfaceRole::Dielectric, SurfaceRole::Dielectric},
                                std::pair{SurfaceRole::Radiator, SurfaceRole::Dielectric},
                                std::pair{SurfaceRole::Ground, SurfaceRole::Radiator}})
            {
                const CMatrix ab = assemble_L(st.assembler(), md, m, a, b, f).matrix;
                const CMatrix ba = assemble_L(st.assembler(), md, m, b, a, f).matrix;
                l = std::max(l, rel(ab, ba.transpose()));
                const CMatrix kab = assemble_K(st.assembler(), md, m, a, b, f).matrix;
                const CMatrix kba = assemble_K(st.assembler(), md, m, b, a, f).matrix;
                k = std::max(k, rel(kab, kba.transpose()));
            }
        }
        add("L reciprocity", l, 1e-8);
        add("K reciprocity", k, 1e-8);
        const CMatrix S = assemble_S(st.mesh(), st.basis(), SurfaceRole::Dielectric, SurfaceRole::Dielectric,
                                     st.coincidence()).matrix;
        add("S antisymmetry", (S + S.transpose()).cwiseAbs().maxCoeff() / S.cwiseAbs().maxCoeff(), 1e-8);

        SystemOptions full;
        full.reuse_transposes = false;
        const BlockedSystem sys = assemble_system(st, media, f, full);
        const RVector D = sys.sign_flip();
        const RVector D1 = D.head(sys.n1());
        const CMatrix Z11 = sys.Z11();
        const CMatrix DZD = D1.asDiagonal() * Z11 * D1.asDiagonal();
        add("sign similarity Z11", rel(Z11.transpose(), DZD), 1e-8);
        const CMatrix DZ12 = D1.asDiagonal() * CMatrix(sys.Z12());
        add("sign similarity Z21", rel(CMatrix(sys.Z21()), DZ12.transpose()), 1e-8);
        const SchurOperator op = schur(sys);
        add("schur asymmetry", op.asymmetry, 1e-6);
    }
    return out;
}

int run_command(const std::string& command, const RunOptions& options)
{
    configure_logging(options.quiet);
    try
    {
        if (command == "validate")
        {
            AssemblyOptions assembly;
            if (options.config)
                assembly = load_config(*options.config).assembly;
            apply_threads(options.threads >= 0 ? options.threads : assembly.threads);
            const auto t0 = Clock::now();
            const auto checks = validation_suite(assembly);
            bool ok = true;
            for (const auto& c : checks)
            {
                std::printf("%s %-28s %.3e (limit %.1e)%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                            c.limit, c.detail.empty() ? "" : "  ", c.detail.c_str());
                ok = ok && c.pass;
            }
            std::fflush(stdout);
            spdlog::info("validation finished in {:.1f} s", seconds_since(t0));
            return ok ? exit_ok : exit_validation_failed;
        }
        if (command != "sweep" && command != "scatter" && command != "modes")
            throw ConfigError("unknown command '" + command + "'");
        if (!options.config)
            throw ConfigError("--config is required for '" + command + "'");
        RunConfig cfg = load_config(*options.config);
        if (options.threads >= 0)
        {
            cfg.threads = options.threads;
            cfg.assembly.threads = options.threads;
        }
        apply_threads(cfg.threads);
        const fs::path out = options.out ? *options.out : cfg.out_dir;
        if (command == "sweep")
            run_sweep(cfg, out);
        else if (command == "scatter")
            run_scatter(cfg, out);
        else
            run_modes(cfg, out);
        spdlog::info("outputs written to {}", out.string());
        return exit_ok;
    }
    catch (const std::exception& e)
    {
        spdlog::error("{}", e.what());
        return exit_error;
    }
}

} // namespace mtfcma
