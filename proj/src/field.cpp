#include "stripflow/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace stripflow {

using nlohmann::json;

void KernelConfig::validate() const {
    if (image_order < 1) throw std::invalid_argument("KernelConfig: image_order must be >= 1");
    if (!(quad_tol > 0.0)) throw std::invalid_argument("KernelConfig: quad_tol must be > 0");
    if (!(near_singular_split > 0.0))
        throw std::invalid_argument("KernelConfig: near_singular_split must be > 0");
}

void PatchSet::validate(bool require_mirror) const {
    for (const Patch& p : patches) {
        if (p.poly.size() < 3) throw std::invalid_argument("PatchSet: polygon with < 3 vertices");
        if (!std::isfinite(p.value)) throw std::invalid_argument("PatchSet: non-finite patch value");
        for (const Vec2& v : p.poly) {
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw std::invalid_argument("PatchSet: non-finite vertex");
            if (v.y < -1e-12 || v.y > 1.0 + 1e-12)
                throw std::invalid_argument("PatchSet: vertex outside the strip [0,1]");
        }
    }
    if (!require_mirror) return;
    // mirror-closure: every patch has the x1-reflected, value-negated partner
    for (const Patch& p : patches) {
        const Polygon mir = reflected_x(p.poly);
        bool found = false;
        for (const Patch& q : patches) {
            if (q.poly.size() != mir.size() || std::abs(q.value + p.value) > 1e-12) continue;
            // same vertex cycle up to rotation
            for (size_t off = 0; off < q.poly.size() && !found; ++off) {
                bool ok = true;
                for (size_t k = 0; k < mir.size(); ++k) {
                    if (norm2(q.poly[(off + k) % q.poly.size()] - mir[k]) > 1e-24) { ok = false; break; }
                }
                found = ok;
            }
            if (found) break;
        }
        if (!found) throw std::invalid_argument("PatchSet: mirror-closure violated");
    }
}

double PatchSet::max_abs_value() const {
    double m = 0.0;
    for (const Patch& p : patches) m = std::max(m, std::abs(p.value));
    return m;
}

double PatchSet::support_radius() const {
    double r = 0.0;
    for (const Patch& p : patches)
        for (const Vec2& v : p.poly)
            if (v.x >= 0.0) r = std::max(r, norm(v));
    return r;
}

PatchSet PatchSet::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    PatchSet ps;
    for (const auto& jp : j.at("patches")) {
        Patch p;
        p.value = jp.at("value").get<double>();
        for (const auto& v : jp.at("vertices"))
            p.poly.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        ps.patches.push_back(std::move(p));
    }
    return ps;
}

void PatchSet::save_json(const std::string& path) const {
    json j;
    j["patches"] = json::array();
    for (const Patch& p : patches) {
        json jp;
        jp["value"] = p.value;
        jp["vertices"] = json::array();
        for (const Vec2& v : p.poly) jp["vertices"].push_back({v.x, v.y});
        j["patches"].push_back(std::move(jp));
    }
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

double VorticityField::sample(double x, double y) const {
    if (x <= -L || x >= L || y <= 0.0 || y >= 1.0) {
        // clamp vertical (walls carry field values), zero outside horizontally
        if (x <= -L || x >= L) return 0.0;
        y = std::clamp(y, 0.0, 1.0);
    }
    const double fx = (x + L) / hx();
    const double fy = y / hy();
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, nx - 1);
    j = std::clamp(j, 0, ny - 1);
    const double tx = fx - i, ty = fy - j;
    return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) +
           (1 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
}

void VorticityField::validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("VorticityField: L must be > 0");
    if (nx < 2 || ny < 1 || nx % 2 != 0)
        throw std::invalid_argument("VorticityField: need nx even >= 2, ny >= 1");
    if (values.size() != static_cast<size_t>(nx + 1) * (ny + 1))
        throw std::invalid_argument("VorticityField: values size mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("VorticityField: eps must be > 0");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("VorticityField: non-finite value");
    if (max_mirror_defect() > 1e-12 * std::max(1.0, eps))
        throw std::invalid_argument("VorticityField: odd symmetry violated");
}

double VorticityField::max_mirror_defect() const {
    double d = 0.0;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx / 2; ++i)
            d = std::max(d, std::abs(at(i, j) + at(nx - i, j)));
    return d;
}

VorticityField VorticityField::load(const std::string& header_path) {
    std::ifstream in(header_path);
    if (!in) throw std::runtime_error("cannot open " + header_path);
    json j;
    in >> j;
    VorticityField f;
    f.L = j.at("L").get<double>();
    f.nx = j.at("nx").get<int>();
    f.ny = j.at("ny").get<int>();
    f.eps = j.at("eps").get<double>();
    const std::string bin = j.at("data").get<std::string>();
    std::string bin_path = bin;
    if (bin.find('/') == std::string::npos) {
        const auto slash = header_path.find_last_of('/');
        if (slash != std::string::npos) bin_path = header_path.substr(0, slash + 1) + bin;
    }
    f.values.resize(static_cast<size_t>(f.nx + 1) * (f.ny + 1));
    std::ifstream b(bin_path, std::ios::binary);
    if (!b) throw std::runtime_error("cannot open " + bin_path);
    b.read(reinterpret_cast<char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!b) throw std::runtime_error("short read of " + bin_path);
    return f;
}

void VorticityField::save(const std::string& header_path, const std::string& bin_path) const {
    json j;
    j["L"] = L;
    j["nx"] = nx;
    j["ny"] = ny;
    j["eps"] = eps;
    const auto slash = bin_path.find_last_of('/');
    j["data"] = slash == std::string::npos ? bin_path : bin_path.substr(slash + 1);
    std::ofstream out(header_path);
    out << j.dump(2) << "\n";
    std::ofstream b(bin_path, std::ios::binary);
    b.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

} // namespace stripflow
