#include "magspec/io.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace magspec::io {

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw InvalidArgument(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw InvalidArgument(std::string("field '") + key + "' must be numeric");
    return j.at(key).get<double>();
}

std::string type_of(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw InvalidArgument("descriptor needs a string 'type'");
    return j.at("type").get<std::string>();
}

} // namespace

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3)) throw InvalidArgument("expected a 2- or 3-vector");
    Vec3 v = Vec3::Zero();
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InvalidArgument("vector entries must be numeric");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Rotation rotation_from_json(const json& j) {
    if (j.is_object() && j.contains("quaternion")) {
        const auto& w = j.at("quaternion");
        if (!w.is_array() || w.size() != 4) throw InvalidArgument("quaternion needs 4 entries");
        return Rotation::from_quaternion(w[0].get<double>(), w[1].get<double>(), w[2].get<double>(),
                                         w[3].get<double>());
    }
    if (j.is_object() && j.contains("axis")) {
        return Rotation::from_axis_angle(vec3_from_json(j.at("axis")), number(j, "angle"));
    }
    if (!j.is_array() || j.size() != 9) throw InvalidArgument("rotation needs 9 row-major entries");
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = j[static_cast<std::size_t>(3 * r + c)].get<double>();
    return Rotation(m);
}

json rotation_to_json(const Rotation& r) {
    json out = json::array();
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) out.push_back(r.matrix()(i, c));
    return out;
}

Polynomial3 polynomial_from_json(const json& j) {
    if (!j.is_array()) throw InvalidArgument("polynomial must be a list of [a, b, c, coefficient]");
    Polynomial3 p;
    for (const auto& term : j) {
        if (!term.is_array() || term.size() != 4) throw InvalidArgument("polynomial term needs 4 entries");
        p.add(term[0].get<int>(), term[1].get<int>(), term[2].get<int>(), term[3].get<double>());
    }
    return p;
}

json polynomial_to_json(const Polynomial3& p) {
    json out = json::array();
    const auto& ex = Polynomial3::exponents();
    for (int i = 0; i < Polynomial3::count; ++i) {
        double c = p.coefficients()[static_cast<std::size_t>(i)];
        if (c != 0.0) out.push_back(json::array({ex[static_cast<std::size_t>(i)].a, ex[static_cast<std::size_t>(i)].b,
                                                 ex[static_cast<std::size_t>(i)].c, c}));
    }
    return out;
}

Domain domain_from_json(const json& j) {
    const std::string t = type_of(j);
    const Vec3 c = j.contains("center") ? vec3_from_json(j.at("center")) : Vec3::Zero();
    if (t == "ball") {
        double r = number_or(j, "radius", 1.0);
        if (!(r > 0)) throw InvalidArgument("ball radius must be positive");
        return Domain::ball(c, r);
    }
    if (t == "ellipsoid") {
        Vec3 a = vec3_from_json(j.at("axes"));
        if (!(a.minCoeff() > 0)) throw InvalidArgument("ellipsoid semi-axes must be positive");
        return Domain::ellipsoid(c, a);
    }
    if (t == "disk" || t == "disk2d") {
        double r = number_or(j, "radius", 1.0);
        if (!(r > 0)) throw InvalidArgument("disk radius must be positive");
        return Domain::disk(c, r);
    }
    throw InvalidArgument("unknown domain type '" + t + "'");
}

json domain_to_json(const Domain& d) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>)
                return {{"type", "ball"}, {"center", vec3_to_json(s.center)}, {"radius", s.radius}};
            else if constexpr (std::is_same_v<S, Ellipsoid>)
                return {{"type", "ellipsoid"}, {"center", vec3_to_json(s.center)}, {"axes", vec3_to_json(s.axes)}};
            else
                return {{"type", "disk"}, {"center", vec3_to_json(s.center)}, {"radius", s.radius}};
        },
        d.variant());
}

FieldPtr field_from_json(const json& j) {
    const std::string t = type_of(j);
    if (t == "linear") {
        return linear_potential(j.contains("B0") ? vec3_from_json(j.at("B0")) : Vec3::UnitZ());
    }
    if (t == "helical") {
        double tau = number(j, "tau");
        Rotation Q = j.contains("rotation") ? rotation_from_json(j.at("rotation")) : Rotation();
        bool normalized = j.value("normalized", false);
        Vec3 origin = j.contains("origin") ? vec3_from_json(j.at("origin")) : Vec3::Zero();
        if (normalized) return normalized_helical(tau, Q, origin);
        if (origin.norm() != 0.0) throw InvalidArgument("origin is only supported for normalized helical fields");
        return helical(tau, Q);
    }
    if (t == "polynomial") {
        const auto& comps = j.at("components");
        if (!comps.is_array() || comps.size() != 3) throw InvalidArgument("polynomial field needs 3 components");
        return polynomial_field({polynomial_from_json(comps[0]), polynomial_from_json(comps[1]),
                                 polynomial_from_json(comps[2])});
    }
    if (t == "gauge_shifted") {
        return gauge_shifted(field_from_json(j.at("base")), polynomial_from_json(j.at("phi")));
    }
    if (t == "dilated") {
        Vec3 x0 = j.contains("x0") ? vec3_from_json(j.at("x0")) : Vec3::Zero();
        return dilated(field_from_json(j.at("base")), number(j, "R"), x0);
    }
    throw InvalidArgument("unknown field type '" + t + "'");
}

json field_to_json(const FieldSpec& f) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, LinearField>) {
                return {{"type", "linear"}, {"B0", vec3_to_json(s.B0)}};
            } else if constexpr (std::is_same_v<S, HelicalField>) {
                json out = {{"type", "helical"},
                            {"tau", s.tau},
                            {"rotation", rotation_to_json(s.Q)},
                            {"normalized", s.normalized}};
                if (s.origin.norm() != 0.0) out["origin"] = vec3_to_json(s.origin);
                return out;
            } else if constexpr (std::is_same_v<S, GaugeShiftedField>) {
                return {{"type", "gauge_shifted"}, {"base", field_to_json(*s.base)}, {"phi", polynomial_to_json(s.phi)}};
            } else if constexpr (std::is_same_v<S, PolynomialField>) {
                return {{"type", "polynomial"},
                        {"components", json::array({polynomial_to_json(s.components[0]),
                                                    polynomial_to_json(s.components[1]),
                                                    polynomial_to_json(s.components[2])})}};
            } else if constexpr (std::is_same_v<S, DilatedField>) {
                return {{"type", "dilated"}, {"base", field_to_json(*s.base)}, {"R", s.R}, {"x0", vec3_to_json(s.x0)}};
            } else {
                throw InvalidArgument("pullback fields cannot be serialized");
            }
        },
        f.variant());
}

json degennes_to_json(const degennes::DeGennesMinimum& m, const std::vector<double>& tail_points) {
    json tails = json::array();
    for (double t : tail_points) tails.push_back({{"t", t}, {"mass", degennes::ground_state_tail(m.u0, t)}});
    return {{"xi0", m.xi0},
            {"theta0", m.theta0},
            {"bracket", json::array({m.bracket.first, m.bracket.second})},
            {"T", m.disc.T},
            {"h", m.disc.h},
            {"certified", m.disc.certified()},
            {"tail_mass", tails}};
}

void write_text_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, p);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("malformed JSON in '" + path + "': " + e.what());
    }
}

namespace {

void put_le(std::string& buf, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

double get_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
}

} // namespace

void write_vector_binary(const std::string& path, const CVector& v) {
    std::string buf;
    buf.reserve(static_cast<std::size_t>(v.size()) * 16);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        put_le(buf, v[i].real());
        put_le(buf, v[i].imag());
    }
    write_text_atomic(path, buf);
}

CVector read_vector_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() % 16 != 0) throw InvalidArgument("vector file size is not a multiple of 16 bytes");
    CVector v(static_cast<Eigen::Index>(buf.size() / 16));
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(get_le(p + 16 * i), get_le(p + 16 * i + 8));
    return v;
}

json grid_nodes_to_json(const Grid& g) {
    json idx = json::array();
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto& l = g.lattice_index(n);
        idx.push_back(json::array({l[0], l[1], l[2]}));
    }
    return {{"dimension", g.dimension()},
            {"h", g.h()},
            {"origin", vec3_to_json(g.origin())},
            {"shape", json::array({g.shape()[0], g.shape()[1], g.shape()[2]})},
            {"nodes", std::move(idx)}};
}

} // namespace magspec::io
