#include "superhedge/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "superhedge/constraints.hpp"

namespace superhedge {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- value-level text cursor -------------------------------------------------

class Cursor {
 public:
  Cursor(const std::string& s, int line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("scenario line " + std::to_string(line_) + ": " + what +
                         " near '" + s_.substr(pos_) + "'",
                     pos_);
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected an identifier");
    return s_.substr(start, pos_ - start);
  }

  std::string quoted() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '"') fail("expected a quoted string");
    const std::size_t start = ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
    if (pos_ >= s_.size()) fail("unterminated string");
    return s_.substr(start, pos_++ - start);
  }

  std::vector<double> tuple() {
    expect('(');
    std::vector<double> v;
    if (!peek(')')) {
      v.push_back(number());
      while (eat(',')) v.push_back(number());
    }
    expect(')');
    return v;
  }

  // list of numbers or tuples: [1, 2] or [(1, 0.5), (3, 0.5)]
  std::vector<std::vector<double>> list() {
    expect('[');
    std::vector<std::vector<double>> items;
    if (!peek(']')) {
      do {
        if (peek('('))
          items.push_back(tuple());
        else
          items.push_back({number()});
      } while (eat(','));
    }
    expect(']');
    return items;
  }

 private:
  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quote = !quote;
    if (line[i] == '#' && !quote) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// --- per-node table ----------------------------------------------------------

struct NodeTableEntry {
  bool is_default = false;
  int time = 0;
  std::vector<double> history;  // time * d values
  std::vector<std::vector<double>> vertices;
  std::vector<std::vector<double>> rays;
};

std::vector<NodeTableEntry> parse_node_table(const std::string& text) {
  std::vector<NodeTableEntry> entries;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    Cursor c(line, lineno);
    NodeTableEntry e;
    const std::string head = c.ident();
    if (head == "default") {
      e.is_default = true;
    } else if (head == "node") {
      if (c.ident() != "t") c.fail("expected t=<time>");
      c.expect('=');
      e.time = static_cast<int>(c.number());
      if (c.peek('x') || !c.peek(':')) {
        if (c.ident() != "x") c.fail("expected x=(...)...");
        c.expect('=');
        while (c.peek('(')) {
          for (double v : c.tuple()) e.history.push_back(v);
        }
      }
    } else {
      c.fail("expected 'default' or 'node'");
    }
    c.expect(':');
    while (!c.done()) {
      const std::string key = c.ident();
      c.expect('=');
      auto items = c.list();
      if (key == "vertices")
        e.vertices = items;
      else if (key == "rays")
        e.rays = items;
      else
        c.fail("unknown node table key '" + key + "'");
      c.eat(',');
    }
    if (e.vertices.empty()) c.fail("node entry needs vertices");
    entries.push_back(std::move(e));
  }
  if (entries.empty())
    throw ValidationError("per-node table is empty");
  return entries;
}

NodeSetRule node_table_rule(std::vector<NodeTableEntry> entries, int assets) {
  return [entries = std::move(entries), assets](const NodeContext& ctx) {
    const NodeTableEntry* fallback = nullptr;
    for (const auto& e : entries) {
      if (e.is_default) {
        fallback = &e;
        continue;
      }
      if (e.time != ctx.time) continue;
      if (e.history.size() != ctx.history.size()) continue;
      bool match = true;
      for (std::size_t i = 0; i < e.history.size(); ++i)
        if (std::fabs(e.history[i] - ctx.history[i]) > 1e-9) match = false;
      if (match) return NodeSet::make(assets, e.vertices, e.rays);
    }
    if (fallback) return NodeSet::make(assets, fallback->vertices, fallback->rays);
    std::ostringstream os;
    os << "per-node table has no entry for node t=" << ctx.time << " x=";
    for (double v : ctx.history) os << v << ' ';
    throw ValidationError(os.str());
  };
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

Scenario Scenario::parse(const std::string& text, const Resolver& resolver) {
  Scenario sc;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  enum class Section { none, model, marginal, option, constraint, lattice, extra, task };
  Section section = Section::none;
  Scenario::Marginal* cur_marginal = nullptr;
  Scenario::Option* cur_option = nullptr;
  std::pair<int, int> cur_extra{0, 0};
  bool seen_model = false;

  auto need = [&](bool ok, const std::string& what) {
    if (!ok)
      throw ParseError("scenario line " + std::to_string(lineno) + ": " + what,
                       0);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      need(line.back() == ']', "unterminated section header");
      const std::string inner = trim(line.substr(1, line.size() - 2));
      Cursor c(inner, lineno);
      const std::string kind = c.ident();
      if (kind == "model") {
        section = Section::model;
        seen_model = true;
      } else if (kind == "marginal") {
        section = Section::marginal;
        Scenario::Marginal m;
        while (!c.done()) {
          const std::string key = c.ident();
          c.expect('=');
          if (key == "asset")
            m.asset = static_cast<int>(c.number());
          else if (key == "time")
            m.time = static_cast<int>(c.number());
          else
            c.fail("unknown marginal attribute '" + key + "'");
        }
        sc.marginals.push_back(std::move(m));
        cur_marginal = &sc.marginals.back();
      } else if (kind == "option") {
        section = Section::option;
        Scenario::Option o;
        o.id = c.done() ? "option" + std::to_string(sc.options.size() + 1)
                        : c.ident();
        sc.options.push_back(std::move(o));
        cur_option = &sc.options.back();
      } else if (kind == "constraint") {
        section = Section::constraint;
      } else if (kind == "lattice") {
        section = Section::lattice;
      } else if (kind == "extra") {
        section = Section::extra;
        int asset = 0, time = 0;
        while (!c.done()) {
          const std::string key = c.ident();
          c.expect('=');
          if (key == "asset")
            asset = static_cast<int>(c.number());
          else if (key == "time")
            time = static_cast<int>(c.number());
          else
            c.fail("unknown extra attribute '" + key + "'");
        }
        need(asset > 0 && time > 0, "extra section needs asset= and time=");
        cur_extra = {asset, time};
      } else if (kind == "task") {
        section = Section::task;
      } else {
        c.fail("unknown section '" + kind + "'");
      }
      continue;
    }

    const auto eq = line.find('=');
    need(eq != std::string::npos, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    Cursor v(value, lineno);

    switch (section) {
      case Section::none:
        need(false, "content before the first section header");
        break;
      case Section::model: {
        if (key == "assets")
          sc.assets = static_cast<int>(v.number());
        else if (key == "periods")
          sc.periods = static_cast<int>(v.number());
        else if (key == "x0")
          sc.x0 = v.tuple();
        else
          v.fail("unknown model key '" + key + "'");
        break;
      }
      case Section::marginal: {
        auto& m = *cur_marginal;
        if (key == "atoms") {
          m.source = Scenario::Marginal::Source::atoms;
          m.atoms.clear();
          for (const auto& t : v.list()) {
            need(t.size() == 2, "atoms must be (level, weight) pairs");
            m.atoms.push_back({t[0], t[1]});
          }
        } else if (key == "preset") {
          m.source = Scenario::Marginal::Source::preset;
          const std::string name = v.ident();
          if (name == "uniform") {
            v.expect('(');
            const double lo = v.number();
            v.expect(',');
            const double hi = v.number();
            v.expect(')');
            m.preset = DensityPreset::uniform(lo, hi);
          } else if (name == "tent") {
            m.preset = DensityPreset::tent();
          } else if (name == "dirac") {
            v.expect('(');
            m.preset = DensityPreset::dirac(v.number());
            v.expect(')');
          } else {
            v.fail("unknown preset '" + name + "'");
          }
        } else if (key == "n_atoms") {
          m.n_atoms = static_cast<int>(v.number());
        } else if (key == "calls") {
          m.source = Scenario::Marginal::Source::csv;
          m.csv_ref = v.quoted();
          if (!sc.aux.count(m.csv_ref)) sc.aux[m.csv_ref] = resolver(m.csv_ref);
        } else {
          v.fail("unknown marginal key '" + key + "'");
        }
        break;
      }
      case Section::option: {
        auto& o = *cur_option;
        if (key == "payoff") {
          o.payoff = v.quoted();
        } else if (key == "asks" || key == "bids") {
          auto& side = key == "asks" ? o.asks : o.bids;
          side.clear();
          for (const auto& t : v.list()) {
            need(t.size() == 2, key + " must be (price, quantity) pairs");
            side.push_back({t[0], t[1]});
          }
        } else if (key == "unbounded_ask_price") {
          o.unbounded_ask_price = v.number();
        } else if (key == "unbounded_bid_price") {
          o.unbounded_bid_price = v.number();
        } else {
          v.fail("unknown option key '" + key + "'");
        }
        break;
      }
      case Section::constraint: {
        if (key == "constraint") {
          auto& c = sc.constraint;
          c.kind = v.ident();
          if (c.kind == "unconstrained") {
          } else if (c.kind == "shortselling" || c.kind == "gamma") {
            v.expect('(');
            c.numbers.clear();
            c.numbers.push_back(v.number());
            while (v.eat(',')) c.numbers.push_back(v.number());
            v.expect(')');
          } else if (c.kind == "non_tradable") {
            v.expect('(');
            c.numbers = {v.number()};
            v.expect(')');
          } else if (c.kind == "drawdown") {
            v.expect('(');
            for (int i = 0; i < 2; ++i) {
              const std::string which = v.ident();
              v.expect('=');
              const std::string expr = v.quoted();
              if (which == "a")
                c.a_expr = expr;
              else if (which == "b")
                c.b_expr = expr;
              else
                v.fail("drawdown arguments are a=\"...\" and b=\"...\"");
              if (i == 0) v.expect(',');
            }
            v.expect(')');
          } else if (c.kind == "per_node") {
            v.expect('(');
            c.per_node_ref = v.quoted();
            v.expect(')');
            if (!sc.aux.count(c.per_node_ref))
              sc.aux[c.per_node_ref] = resolver(c.per_node_ref);
          } else {
            v.fail("unknown constraint kind '" + c.kind + "'");
          }
        } else if (key == "non_approximable") {
          const std::string flag = v.ident();
          sc.constraint.non_approximable = flag == "true";
        } else {
          v.fail("unknown constraint key '" + key + "'");
        }
        break;
      }
      case Section::lattice: {
        if (key == "max_paths")
          sc.max_paths = static_cast<long long>(v.number());
        else
          v.fail("unknown lattice key '" + key + "'");
        break;
      }
      case Section::extra: {
        if (key == "levels") {
          auto& dst = sc.extra_levels[cur_extra];
          for (const auto& t : v.list()) {
            need(t.size() == 1, "extra levels are plain numbers");
            dst.push_back(t[0]);
          }
        } else {
          v.fail("unknown extra key '" + key + "'");
        }
        break;
      }
      case Section::task: {
        if (key == "payoff")
          sc.task_payoff = v.quoted();
        else if (key == "tol")
          sc.task_tol = v.number();
        else
          v.fail("unknown task key '" + key + "'");
        break;
      }
    }
  }
  need(seen_model, "scenario needs a [model] section");
  need(sc.assets >= 1 && sc.periods >= 1, "[model] needs assets and periods");
  need(static_cast<int>(sc.x0.size()) == sc.assets,
       "[model] x0 must list one price per asset");
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  std::string dir = ".";
  if (const auto slash = path.find_last_of('/'); slash != std::string::npos)
    dir = path.substr(0, slash);
  auto resolver = [dir](const std::string& name) {
    std::ifstream aux(dir + "/" + name);
    if (!aux) throw IoError("cannot open auxiliary file '" + name + "'");
    std::ostringstream b;
    b << aux.rdbuf();
    return b.str();
  };
  return parse(buf.str(), resolver);
}

std::string Scenario::serialize() const {
  std::ostringstream os;
  os << "[model]\n";
  os << "assets = " << assets << "\n";
  os << "periods = " << periods << "\n";
  os << "x0 = (";
  for (std::size_t i = 0; i < x0.size(); ++i)
    os << (i ? ", " : "") << fmt(x0[i]);
  os << ")\n";

  for (const auto& m : marginals) {
    os << "\n[marginal asset=" << m.asset << " time=" << m.time << "]\n";
    switch (m.source) {
      case Marginal::Source::atoms: {
        os << "atoms = [";
        for (std::size_t i = 0; i < m.atoms.size(); ++i)
          os << (i ? ", " : "") << '(' << fmt(m.atoms[i].level) << ", "
             << fmt(m.atoms[i].weight) << ')';
        os << "]\n";
        break;
      }
      case Marginal::Source::preset: {
        os << "preset = ";
        switch (m.preset.kind) {
          case DensityPreset::Kind::uniform:
            os << "uniform(" << fmt(m.preset.lo) << ", " << fmt(m.preset.hi)
               << ")\n";
            break;
          case DensityPreset::Kind::tent:
            os << "tent\n";
            break;
          case DensityPreset::Kind::dirac:
            os << "dirac(" << fmt(m.preset.x) << ")\n";
            break;
        }
        os << "n_atoms = " << m.n_atoms << "\n";
        break;
      }
      case Marginal::Source::csv:
        os << "calls = \"" << m.csv_ref << "\"\n";
        break;
    }
  }

  for (const auto& o : options) {
    os << "\n[option " << o.id << "]\n";
    os << "payoff = \"" << o.payoff << "\"\n";
    auto side = [&](const char* name, const std::vector<LadderLevel>& ls) {
      if (ls.empty()) return;
      os << name << " = [";
      for (std::size_t i = 0; i < ls.size(); ++i)
        os << (i ? ", " : "") << '(' << fmt(ls[i].price) << ", "
           << fmt(ls[i].quantity) << ')';
      os << "]\n";
    };
    side("asks", o.asks);
    side("bids", o.bids);
    if (o.unbounded_ask_price)
      os << "unbounded_ask_price = " << fmt(*o.unbounded_ask_price) << "\n";
    if (o.unbounded_bid_price)
      os << "unbounded_bid_price = " << fmt(*o.unbounded_bid_price) << "\n";
  }

  os << "\n[constraint]\n";
  os << "constraint = " << constraint.kind;
  if (constraint.kind == "shortselling" || constraint.kind == "gamma" ||
      constraint.kind == "non_tradable") {
    os << '(';
    for (std::size_t i = 0; i < constraint.numbers.size(); ++i)
      os << (i ? ", " : "") << fmt(constraint.numbers[i]);
    os << ')';
  } else if (constraint.kind == "drawdown") {
    os << "(a=\"" << constraint.a_expr << "\", b=\"" << constraint.b_expr
       << "\")";
  } else if (constraint.kind == "per_node") {
    os << "(\"" << constraint.per_node_ref << "\")";
  }
  os << "\n";
  if (constraint.non_approximable) os << "non_approximable = true\n";

  if (max_paths != PathLattice::kDefaultMaxPaths) {
    os << "\n[lattice]\nmax_paths = " << max_paths << "\n";
  }
  for (const auto& [key, levels] : extra_levels) {
    os << "\n[extra asset=" << key.first << " time=" << key.second << "]\n";
    os << "levels = [";
    for (std::size_t i = 0; i < levels.size(); ++i)
      os << (i ? ", " : "") << fmt(levels[i]);
    os << "]\n";
  }

  os << "\n[task]\n";
  os << "payoff = \"" << task_payoff << "\"\n";
  if (task_tol) os << "tol = " << fmt(*task_tol) << "\n";
  return os.str();
}

PricingProblem Scenario::assemble() const {
  std::vector<MarginalDistribution> dists;
  for (const auto& m : marginals) {
    switch (m.source) {
      case Marginal::Source::atoms:
        dists.push_back(MarginalDistribution::make(m.asset, m.time, m.atoms));
        break;
      case Marginal::Source::preset:
        dists.push_back(discretize_density(m.preset, m.n_atoms, m.asset, m.time));
        break;
      case Marginal::Source::csv: {
        std::istringstream in(aux.at(m.csv_ref));
        auto curves = load_call_quotes_csv(in);
        auto it = curves.find({m.asset, m.time});
        if (it == curves.end())
          throw ValidationError("call-quote file '" + m.csv_ref +
                                "' has no rows for asset " +
                                std::to_string(m.asset) + ", time " +
                                std::to_string(m.time));
        std::vector<double> strikes;
        for (const auto& q : it->second.samples) strikes.push_back(q.strike);
        dists.push_back(marginal_from_calls(it->second, strikes));
        break;
      }
    }
  }
  MarketModel model = MarketModel::make(assets, periods, x0, std::move(dists));
  PathLattice lattice = PathLattice::build(model, extra_levels, max_paths);

  std::vector<TradableOption> opts;
  for (const auto& o : options) {
    opts.push_back(TradableOption{
        o.id, parse_payoff(o.payoff),
        CostLadder::make(o.asks, o.bids, o.unbounded_ask_price,
                         o.unbounded_bid_price)});
  }

  ConstraintSpec spec = ConstraintSpec::unconstrained();
  if (constraint.kind == "unconstrained") {
    spec = ConstraintSpec::unconstrained();
  } else if (constraint.kind == "shortselling") {
    std::vector<double> c = constraint.numbers;
    if (static_cast<int>(c.size()) == 1 && assets > 1)
      c.assign(assets, c[0]);
    spec = builder_shortselling(c);
  } else if (constraint.kind == "gamma") {
    std::vector<double> g = constraint.numbers;
    if (static_cast<int>(g.size()) == 1 && assets > 1)
      g.assign(assets, g[0]);
    spec = ConstraintSpec::gamma_bound(g);
  } else if (constraint.kind == "non_tradable") {
    spec = builder_non_tradable(
        constraint.numbers.empty() ? 0 : static_cast<int>(constraint.numbers[0]),
        assets);
  } else if (constraint.kind == "drawdown") {
    std::vector<PayoffExpr> a, b;
    for (const auto& e : split(constraint.a_expr, ';'))
      a.push_back(parse_payoff(e));
    for (const auto& e : split(constraint.b_expr, ';'))
      b.push_back(parse_payoff(e));
    if (static_cast<int>(a.size()) == 1 && assets > 1) {
      while (static_cast<int>(a.size()) < assets) a.push_back(a.front());
    }
    if (static_cast<int>(b.size()) == 1 && assets > 1) {
      while (static_cast<int>(b.size()) < assets) b.push_back(b.front());
    }
    spec = builder_drawdown(std::move(a), std::move(b));
  } else if (constraint.kind == "per_node") {
    auto entries = parse_node_table(aux.at(constraint.per_node_ref));
    spec = ConstraintSpec::per_node(node_table_rule(std::move(entries), assets),
                                    false, "per_node");
  } else {
    throw ValidationError("unknown constraint kind '" + constraint.kind + "'");
  }
  spec.non_approximable = constraint.non_approximable;

  return PricingProblem::make(std::move(lattice), parse_payoff(task_payoff),
                              std::move(opts), std::move(spec));
}

}  // namespace superhedge
