#include "regime_sde/time_function.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "regime_sde/errors.hpp"

namespace rsde {

struct TimeFunction::Node {
    Op op = Op::Const;
    double value = 0.0;
    double scale = 1.0;
    double shift = 0.0;
    std::vector<TimeFunction> args;
    bool has_t = false;
    bool has_n = false;
};

namespace {

std::shared_ptr<TimeFunction::Node> make_node(Op op, std::vector<TimeFunction> args) {
    auto node = std::make_shared<TimeFunction::Node>();
    node->op = op;
    node->args = std::move(args);
    for (const auto& a : node->args) {
        node->has_t = node->has_t || a.depends_on_time();
        node->has_n = node->has_n || a.depends_on_index();
    }
    return node;
}

double fast_pow(double base, double exponent) {
    if (exponent == 0.5) return std::sqrt(base);
    if (exponent == 2.0) return base * base;
    if (exponent == 1.0) return base;
    if (exponent == -1.0) return 1.0 / base;
    return std::pow(base, exponent);
}

}  // namespace

TimeFunction::TimeFunction() : TimeFunction(constant(0.0)) {}

TimeFunction::TimeFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

TimeFunction TimeFunction::constant(double value) {
    auto node = std::make_shared<Node>();
    node->op = Op::Const;
    node->value = value;
    return TimeFunction(std::move(node));
}

TimeFunction TimeFunction::time() {
    auto node = std::make_shared<Node>();
    node->op = Op::Time;
    node->has_t = true;
    return TimeFunction(std::move(node));
}

TimeFunction TimeFunction::index() {
    auto node = std::make_shared<Node>();
    node->op = Op::Index;
    node->has_n = true;
    return TimeFunction(std::move(node));
}

TimeFunction TimeFunction::sum(const TimeFunction& a, const TimeFunction& b) {
    const auto ca = a.constant_value();
    const auto cb = b.constant_value();
    if (ca && cb) return constant(*ca + *cb);
    if (ca && *ca == 0.0) return b;
    if (cb && *cb == 0.0) return a;
    return TimeFunction(make_node(Op::Add, {a, b}));
}

TimeFunction TimeFunction::product(const TimeFunction& a, const TimeFunction& b) {
    auto ca = a.constant_value();
    auto cb = b.constant_value();
    if (ca && cb) return constant(*ca * *cb);
    if (cb && !ca) return product(b, a);
    if (ca) {
        if (*ca == 0.0) return constant(0.0);
        if (*ca == 1.0) return b;
        // c1·(c2·x) -> (c1·c2)·x
        if (b.op() == Op::Mul) {
            if (auto inner = b.node_->args[0].constant_value()) {
                return product(constant(*ca * *inner), b.node_->args[1]);
            }
        }
    }
    return TimeFunction(make_node(Op::Mul, {a, b}));
}

TimeFunction TimeFunction::power(const TimeFunction& base, const TimeFunction& exponent) {
    const auto cb = base.constant_value();
    const auto ce = exponent.constant_value();
    if (ce) {
        if (*ce == 0.0) return constant(1.0);
        if (*ce == 1.0) return base;
        if (cb) return constant(fast_pow(*cb, *ce));
    }
    return TimeFunction(make_node(Op::Pow, {base, exponent}));
}

TimeFunction TimeFunction::exponential(const TimeFunction& arg) {
    if (auto c = arg.constant_value()) return constant(std::exp(*c));
    return TimeFunction(make_node(Op::Exp, {arg}));
}

TimeFunction TimeFunction::logarithm(const TimeFunction& arg) {
    if (auto c = arg.constant_value()) return constant(std::log(*c));
    return TimeFunction(make_node(Op::Log, {arg}));
}

TimeFunction TimeFunction::affine(double scale, double shift, const TimeFunction& inner) {
    if (!inner.depends_on_time()) return inner;
    if (scale == 1.0 && shift == 0.0) return inner;
    if (inner.op() == Op::Time) return sum(product(constant(scale), time()), constant(shift));
    auto node = make_node(Op::Affine, {inner});
    node->scale = scale;
    node->shift = shift;
    return TimeFunction(std::move(node));
}

bool TimeFunction::depends_on_time() const noexcept { return node_->has_t; }
bool TimeFunction::depends_on_index() const noexcept { return node_->has_n; }
Op TimeFunction::op() const noexcept { return node_->op; }

std::optional<double> TimeFunction::constant_value() const noexcept {
    if (node_->op == Op::Const) return node_->value;
    return std::nullopt;
}

double TimeFunction::operator()(double t) const { return eval_impl(t, nullptr); }

double TimeFunction::eval(double t, double n) const { return eval_impl(t, &n); }

double TimeFunction::eval_impl(double t, const double* n) const {
    const Node& nd = *node_;
    switch (nd.op) {
        case Op::Const:
            return nd.value;
        case Op::Time:
            return t;
        case Op::Index:
            if (n == nullptr) throw ModeError("expression uses the regime index n but none is bound");
            return *n;
        case Op::Add:
            return nd.args[0].eval_impl(t, n) + nd.args[1].eval_impl(t, n);
        case Op::Mul:
            return nd.args[0].eval_impl(t, n) * nd.args[1].eval_impl(t, n);
        case Op::Pow:
            return fast_pow(nd.args[0].eval_impl(t, n), nd.args[1].eval_impl(t, n));
        case Op::Exp:
            return std::exp(nd.args[0].eval_impl(t, n));
        case Op::Log:
            return std::log(nd.args[0].eval_impl(t, n));
        case Op::Affine:
            return nd.args[0].eval_impl(nd.scale * t + nd.shift, n);
    }
    return 0.0;
}

TimeFunction TimeFunction::derivative() const {
    const Node& nd = *node_;
    if (!nd.has_t) return constant(0.0);
    switch (nd.op) {
        case Op::Const:
        case Op::Index:
            return constant(0.0);
        case Op::Time:
            return constant(1.0);
        case Op::Add:
            return nd.args[0].derivative() + nd.args[1].derivative();
        case Op::Mul: {
            const auto& a = nd.args[0];
            const auto& b = nd.args[1];
            return a.derivative() * b + a * b.derivative();
        }
        case Op::Pow: {
            const auto& u = nd.args[0];
            const auto& p = nd.args[1];
            if (!p.depends_on_time()) {
                return p * power(u, p - 1.0) * u.derivative();
            }
            return *this * (p.derivative() * logarithm(u) + p * u.derivative() / u);
        }
        case Op::Exp:
            return *this * nd.args[0].derivative();
        case Op::Log:
            return nd.args[0].derivative() / nd.args[0];
        case Op::Affine:
            return nd.scale * affine(nd.scale, nd.shift, nd.args[0].derivative());
    }
    return constant(0.0);
}

std::optional<std::pair<double, double>> TimeFunction::linear_form() const {
    const Node& nd = *node_;
    if (nd.has_n) return std::nullopt;
    if (!nd.has_t) return std::make_pair(0.0, nd.value);
    switch (nd.op) {
        case Op::Time:
            return std::make_pair(1.0, 0.0);
        case Op::Add: {
            auto a = nd.args[0].linear_form();
            auto b = nd.args[1].linear_form();
            if (!a || !b) return std::nullopt;
            return std::make_pair(a->first + b->first, a->second + b->second);
        }
        case Op::Mul: {
            auto a = nd.args[0].linear_form();
            auto b = nd.args[1].linear_form();
            if (!a || !b) return std::nullopt;
            if (a->first == 0.0) return std::make_pair(a->second * b->first, a->second * b->second);
            if (b->first == 0.0) return std::make_pair(b->second * a->first, b->second * a->second);
            return std::nullopt;
        }
        case Op::Affine: {
            auto f = nd.args[0].linear_form();
            if (!f) return std::nullopt;
            return std::make_pair(f->first * nd.scale, f->first * nd.shift + f->second);
        }
        default:
            return std::nullopt;
    }
}

std::optional<TimeFunction> TimeFunction::antiderivative() const {
    const Node& nd = *node_;
    if (!nd.has_t) return *this * time();
    switch (nd.op) {
        case Op::Time:
            return 0.5 * power(time(), constant(2.0));
        case Op::Add: {
            auto a = nd.args[0].antiderivative();
            auto b = nd.args[1].antiderivative();
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case Op::Mul: {
            const auto& a = nd.args[0];
            const auto& b = nd.args[1];
            if (!a.depends_on_time()) {
                if (auto ib = b.antiderivative()) return a * *ib;
            } else if (!b.depends_on_time()) {
                if (auto ia = a.antiderivative()) return b * *ia;
            }
            return std::nullopt;
        }
        case Op::Pow: {
            const auto p = nd.args[1].constant_value();
            const auto lf = nd.args[0].linear_form();
            if (!p || !lf || lf->first == 0.0) return std::nullopt;
            const auto& u = nd.args[0];
            if (*p == -1.0) return logarithm(u) / lf->first;
            return power(u, constant(*p + 1.0)) / ((*p + 1.0) * lf->first);
        }
        case Op::Exp: {
            const auto lf = nd.args[0].linear_form();
            if (!lf || lf->first == 0.0) return std::nullopt;
            return *this / lf->first;
        }
        case Op::Log: {
            const auto lf = nd.args[0].linear_form();
            if (!lf || lf->first == 0.0) return std::nullopt;
            const auto& u = nd.args[0];
            return (u * *this - u) / lf->first;
        }
        case Op::Affine: {
            auto inner = nd.args[0].antiderivative();
            if (!inner) return std::nullopt;
            return affine(nd.scale, nd.shift, *inner) / nd.scale;
        }
        default:
            return std::nullopt;
    }
}

TimeFunction TimeFunction::bind_index(double n) const {
    const Node& nd = *node_;
    if (!nd.has_n) return *this;
    switch (nd.op) {
        case Op::Index:
            return constant(n);
        case Op::Add:
            return nd.args[0].bind_index(n) + nd.args[1].bind_index(n);
        case Op::Mul:
            return nd.args[0].bind_index(n) * nd.args[1].bind_index(n);
        case Op::Pow:
            return power(nd.args[0].bind_index(n), nd.args[1].bind_index(n));
        case Op::Exp:
            return exponential(nd.args[0].bind_index(n));
        case Op::Log:
            return logarithm(nd.args[0].bind_index(n));
        case Op::Affine:
            return affine(nd.scale, nd.shift, nd.args[0].bind_index(n));
        default:
            return *this;
    }
}

nlohmann::json TimeFunction::to_json() const {
    using nlohmann::json;
    const Node& nd = *node_;
    auto args = [&nd] {
        json a = json::array();
        for (const auto& c : nd.args) a.push_back(c.to_json());
        return a;
    };
    switch (nd.op) {
        case Op::Const:
            return json{{"op", "const"}, {"args", json::array({nd.value})}};
        case Op::Time:
            return json{{"op", "t"}};
        case Op::Index:
            return json{{"op", "n"}};
        case Op::Add:
            return json{{"op", "add"}, {"args", args()}};
        case Op::Mul:
            return json{{"op", "mul"}, {"args", args()}};
        case Op::Pow:
            return json{{"op", "pow"}, {"args", args()}};
        case Op::Exp:
            return json{{"op", "exp"}, {"args", args()}};
        case Op::Log:
            return json{{"op", "log"}, {"args", args()}};
        case Op::Affine:
            return json{{"op", "affine"},
                        {"args", json::array({nd.scale, nd.shift, nd.args[0].to_json()})}};
    }
    return json{};
}

TimeFunction TimeFunction::from_json(const nlohmann::json& j) {
    if (j.is_number()) return constant(j.get<double>());
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
        throw ParseError("expression must be a number or an object with a string \"op\": " + j.dump());
    }
    const auto op = j["op"].get<std::string>();
    const nlohmann::json args = j.value("args", nlohmann::json::array());
    if (!args.is_array()) throw ParseError("\"args\" must be an array in " + j.dump());
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi) {
            throw ParseError("wrong number of arguments for op '" + op + "': " + j.dump());
        }
    };
    auto number = [&](std::size_t i) {
        if (!args[i].is_number()) throw ParseError("op '" + op + "' expects a number at position " + std::to_string(i));
        return args[i].get<double>();
    };

    if (op == "const") {
        if (j.contains("value")) return constant(j["value"].get<double>());
        arity(1, 1);
        return constant(number(0));
    }
    if (op == "t") {
        arity(0, 0);
        return time();
    }
    if (op == "n") {
        arity(0, 0);
        return index();
    }
    if (op == "add" || op == "mul") {
        arity(1, static_cast<std::size_t>(-1));
        TimeFunction acc = from_json(args[0]);
        for (std::size_t i = 1; i < args.size(); ++i) {
            acc = op == "add" ? sum(acc, from_json(args[i])) : product(acc, from_json(args[i]));
        }
        return acc;
    }
    if (op == "pow") {
        arity(2, 2);
        auto exponent = from_json(args[1]);
        return power(from_json(args[0]), exponent);
    }
    if (op == "exp") {
        arity(1, 1);
        return exponential(from_json(args[0]));
    }
    if (op == "log") {
        arity(1, 1);
        return logarithm(from_json(args[0]));
    }
    if (op == "affine") {
        arity(3, 3);
        return affine(number(0), number(1), from_json(args[2]));
    }
    throw ParseError("unknown op '" + op + "'");
}

std::string TimeFunction::str() const {
    const Node& nd = *node_;
    std::ostringstream os;
    os.precision(17);
    switch (nd.op) {
        case Op::Const:
            os << nd.value;
            break;
        case Op::Time:
            os << "t";
            break;
        case Op::Index:
            os << "n";
            break;
        case Op::Add:
            os << "(" << nd.args[0].str() << " + " << nd.args[1].str() << ")";
            break;
        case Op::Mul:
            os << nd.args[0].str() << "*" << nd.args[1].str();
            break;
        case Op::Pow:
            os << "(" << nd.args[0].str() << ")^(" << nd.args[1].str() << ")";
            break;
        case Op::Exp:
            os << "exp(" << nd.args[0].str() << ")";
            break;
        case Op::Log:
            os << "log(" << nd.args[0].str() << ")";
            break;
        case Op::Affine:
            os << "[" << nd.args[0].str() << "](" << nd.scale << "*t + " << nd.shift << ")";
            break;
    }
    return os.str();
}

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b) { return TimeFunction::sum(a, b); }
TimeFunction operator-(const TimeFunction& a) { return TimeFunction::product(TimeFunction::constant(-1.0), a); }
TimeFunction operator-(const TimeFunction& a, const TimeFunction& b) { return a + (-b); }
TimeFunction operator*(const TimeFunction& a, const TimeFunction& b) { return TimeFunction::product(a, b); }
TimeFunction operator/(const TimeFunction& a, const TimeFunction& b) {
    return a * TimeFunction::power(b, TimeFunction::constant(-1.0));
}
TimeFunction operator+(const TimeFunction& a, double b) { return a + TimeFunction::constant(b); }
TimeFunction operator+(double a, const TimeFunction& b) { return TimeFunction::constant(a) + b; }
TimeFunction operator-(const TimeFunction& a, double b) { return a + TimeFunction::constant(-b); }
TimeFunction operator-(double a, const TimeFunction& b) { return TimeFunction::constant(a) - b; }
TimeFunction operator*(double a, const TimeFunction& b) { return TimeFunction::constant(a) * b; }
TimeFunction operator*(const TimeFunction& a, double b) { return TimeFunction::constant(b) * a; }
TimeFunction operator/(const TimeFunction& a, double b) { return TimeFunction::constant(1.0 / b) * a; }
TimeFunction operator/(double a, const TimeFunction& b) { return TimeFunction::constant(a) / b; }

TimeFunction exp(const TimeFunction& f) { return TimeFunction::exponential(f); }
TimeFunction log(const TimeFunction& f) { return TimeFunction::logarithm(f); }
TimeFunction pow(const TimeFunction& f, double exponent) {
    return TimeFunction::power(f, TimeFunction::constant(exponent));
}
TimeFunction pow(const TimeFunction& f, const TimeFunction& exponent) { return TimeFunction::power(f, exponent); }
TimeFunction sqrt(const TimeFunction& f) { return pow(f, 0.5); }

}  // namespace rsde
