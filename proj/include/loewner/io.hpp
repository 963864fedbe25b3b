#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "loewner/driver.hpp"

namespace loewner::io {

using json = nlohmann::json;

// Driver specs:
//   {"horizon": T?, "orientation": "up" | "down",
//    "segments": [{"kind": "constant", "duration": L, "value": c},
//                 {"kind": "linear", "duration": L, "from": a, "to": b},
//                 {"kind": "sqrt", "duration": L, "start": v, "coef": C, "from_end": false},
//                 {"kind": "sampled", "duration": L, "t": [...], "v": [...]}]}
// "slit": {"kind": "slit", "alpha": a, "duration": L} is shorthand for the upward driver
// whose slit leaves 0 at angle a*pi (a reversed sqrt segment); orientation must be "up".

namespace detail {

inline double number(const json& j, const char* key)
{
    if (!j.contains(key)) throw InputError(std::string("driver spec: missing field '") + key + "'");
    if (!j.at(key).is_number()) throw InputError(std::string("driver spec: field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::vector<double> numbers(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array())
        throw InputError(std::string("driver spec: field '") + key + "' must be an array");
    std::vector<double> v;
    for (const auto& e : j.at(key)) {
        if (!e.is_number()) throw InputError(std::string("driver spec: '") + key + "' must hold numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

inline std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

inline Driver driver_from_json(const json& j)
{
    if (!j.is_object()) throw InputError("driver spec must be a JSON object");
    Orientation o = Orientation::Upward;
    if (j.contains("orientation")) {
        if (!j.at("orientation").is_string()) throw InputError("driver spec: orientation must be a string");
        std::string s = j.at("orientation").get<std::string>();
        if (s == "down") o = Orientation::Downward;
        else if (s != "up") throw InputError("driver spec: orientation must be \"up\" or \"down\"");
    }
    if (!j.contains("segments") || !j.at("segments").is_array() || j.at("segments").empty())
        throw InputError("driver spec: segments must be a non-empty array");
    std::vector<Segment> segs;
    double v = 0.0; // running end value, used by "slit"
    for (const auto& s : j.at("segments")) {
        if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string())
            throw InputError("driver spec: every segment needs a string 'kind'");
        std::string kind = s.at("kind").get<std::string>();
        double L = detail::number(s, "duration");
        if (kind == "constant") {
            segs.push_back({L, Constant{detail::number(s, "value")}});
        } else if (kind == "linear") {
            segs.push_back({L, Linear{detail::number(s, "from"), detail::number(s, "to")}});
        } else if (kind == "sqrt") {
            bool fe = s.contains("from_end") && s.at("from_end").is_boolean() && s.at("from_end").get<bool>();
            segs.push_back({L, SqrtCap{detail::number(s, "start"), detail::number(s, "coef"), fe}});
        } else if (kind == "sampled") {
            Sampled q{detail::numbers(s, "t"), detail::numbers(s, "v")};
            segs.push_back({L, std::move(q)});
        } else if (kind == "slit") {
            if (o != Orientation::Upward) throw InputError("driver spec: 'slit' segments need orientation \"up\"");
            if (!(L > 0.0)) throw InputError("segment duration must be positive and finite");
            Driver r = reverse(make_sqrt_slit(detail::number(s, "alpha"), L));
            segs.push_back(shifted(r, v).segments().front());
        } else {
            throw InputError("driver spec: unknown segment kind '" + kind + "'");
        }
        v = segs.back().end_value();
    }
    if (j.contains("horizon")) return Driver(detail::number(j, "horizon"), std::move(segs), o);
    return Driver(std::move(segs), o);
}

inline json driver_to_json(const Driver& d)
{
    json segs = json::array();
    for (const auto& s : d.segments()) {
        json e;
        e["duration"] = s.duration;
        if (auto* c = std::get_if<Constant>(&s.shape)) {
            e["kind"] = "constant";
            e["value"] = c->c;
        } else if (auto* l = std::get_if<Linear>(&s.shape)) {
            e["kind"] = "linear";
            e["from"] = l->v0;
            e["to"] = l->v1;
        } else if (auto* q = std::get_if<SqrtCap>(&s.shape)) {
            e["kind"] = "sqrt";
            e["start"] = q->v0;
            e["coef"] = q->coef;
            e["from_end"] = q->from_end;
        } else {
            const auto& p = std::get<Sampled>(s.shape);
            e["kind"] = "sampled";
            e["t"] = p.t;
            e["v"] = p.v;
        }
        segs.push_back(e);
    }
    return json{{"horizon", d.horizon()},
                {"orientation", d.orientation() == Orientation::Upward ? "up" : "down"},
                {"segments", segs}};
}

// Inline JSON when the argument starts with '{', a file path otherwise.
inline json read_json_arg(const std::string& arg)
{
    std::string text;
    auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && arg[first] == '{') {
        text = arg;
    } else {
        std::ifstream in(arg);
        if (!in) throw InputError("cannot open '" + arg + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

inline Driver read_driver(const std::string& arg) { return driver_from_json(read_json_arg(arg)); }

// RFC 4180 table; numbers with 17 significant digits.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    Csv& row(const std::vector<double>& v)
    {
        std::vector<std::string> s;
        for (double x : v) s.push_back(detail::fmt(x));
        return row_text(s);
    }

    Csv& row_text(const std::vector<std::string>& v)
    {
        if (v.size() != header_.size()) throw InputError("csv: row width does not match the header");
        rows_.push_back(v);
        return *this;
    }

    std::string str() const
    {
        std::string out;
        auto line = [&out](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += quote(r[i]);
            }
            out += "\r\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

    static std::string quote(const std::string& f)
    {
        if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
        std::string q = "\"";
        for (char c : f) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + '"';
    }

    static std::string number(double x) { return detail::fmt(x); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Polyline {
    std::vector<std::pair<double, double>> pts;
    std::string color = "black";
};

// Polylines in data coordinates; the viewport is the data bounding box plus a 5% margin,
// with y pointing up.
inline std::string svg(const std::vector<Polyline>& lines, double width = 480.0, double height = 480.0)
{
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& l : lines)
        for (auto [x, y] : l.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!(x1 >= x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
    double w = std::max(x1 - x0, 1e-12), h = std::max(y1 - y0, 1e-12);
    x0 -= 0.05 * w;
    x1 += 0.05 * w;
    y0 -= 0.05 * h;
    y1 += 0.05 * h;
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                  width, height, width, height);
    os << buf;
    for (const auto& l : lines) {
        os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1\" points=\"";
        bool first = true;
        for (auto [x, y] : l.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            std::snprintf(buf, sizeof buf, "%s%.6f,%.6f", first ? "" : " ", (x - x0) / (x1 - x0) * width,
                          (y1 - y) / (y1 - y0) * height);
            os << buf;
            first = false;
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

} // namespace loewner::io
