#include "boxer/query.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>

#include "boxer/error.hpp"

namespace boxer {

namespace {

constexpr std::array kReserved = {"AND", "OR", "NOT", "DIFF", "XOR", "in",       "correct",
                                  "incorrect", "pred", "actual", "ncorrect", "split", "ids"};

constexpr std::string_view kSpecialChars = "()[]{}=,\"\\";

bool is_reserved(std::string_view word) {
  for (const auto* r : kReserved) {
    if (word == r) return true;
  }
  return false;
}

bool is_word_char(char c) {
  return !(c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') &&
         kSpecialChars.find(c) == std::string_view::npos;
}

std::string quote_name(std::string_view name) {
  bool plain = !name.empty() && !is_reserved(name);
  for (const char c : name) plain = plain && is_word_char(c);
  if (plain) return std::string(name);
  std::string out = "\"";
  for (const char c : name) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string_view op_keyword(SetOp op) {
  switch (op) {
    case SetOp::Union: return "OR";
    case SetOp::Intersection: return "AND";
    case SetOp::Difference: return "DIFF";
    case SetOp::SymmetricDifference: return "XOR";
  }
  return "OR";
}

void describe_into(const Query& q, std::string& out);

void describe_operand(const Query& q, std::string& out) {
  if (std::holds_alternative<ast::Combine>(q.node())) {
    out.push_back('(');
    describe_into(q, out);
    out.push_back(')');
  } else {
    describe_into(q, out);
  }
}

void describe_into(const Query& q, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ast::Empty>) {
          out += "ids{}";
        } else if constexpr (std::is_same_v<T, ast::Correct>) {
          out += "correct(" + quote_name(n.classifier) + ")";
        } else if constexpr (std::is_same_v<T, ast::Incorrect>) {
          out += "incorrect(" + quote_name(n.classifier) + ")";
        } else if constexpr (std::is_same_v<T, ast::Predicted>) {
          out += "pred(" + quote_name(n.classifier) + ")=" + quote_name(n.label);
        } else if constexpr (std::is_same_v<T, ast::Actual>) {
          out += "actual=" + quote_name(n.label);
        } else if constexpr (std::is_same_v<T, ast::FeatureRange>) {
          out += quote_name(n.feature) + " in [" + format_number(n.lo) + "," + format_number(n.hi) +
                 (n.right_closed ? "]" : ")");
        } else if constexpr (std::is_same_v<T, ast::FeatureEquals>) {
          out += quote_name(n.feature) + "=" + quote_name(n.category);
        } else if constexpr (std::is_same_v<T, ast::CumulativeCount>) {
          out += "ncorrect=" + std::to_string(n.k);
        } else if constexpr (std::is_same_v<T, ast::ScopeIs>) {
          out += "split=" + std::string(scope_name(n.scope));
        } else if constexpr (std::is_same_v<T, ast::InstanceIds>) {
          out += "ids{";
          for (std::size_t i = 0; i < n.ids.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += std::to_string(n.ids[i]);
          }
          out.push_back('}');
        } else if constexpr (std::is_same_v<T, ast::Combine>) {
          describe_operand(*n.left, out);
          out.push_back(' ');
          out += op_keyword(n.op);
          out.push_back(' ');
          describe_operand(*n.right, out);
        } else if constexpr (std::is_same_v<T, ast::Not>) {
          out += "NOT ";
          describe_operand(*n.operand, out);
        }
      },
      q.node());
}

// ---------------------------------------------------------------------------
// Parsing

enum class Tok { LParen, RParen, LBracket, RBracket, LBrace, RBrace, Equals, Comma, Word, Quoted, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { tokenize(); }

  Query parse() {
    auto q = parse_or();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'", peek().offset);
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t offset) const {
    throw Error(ErrorCode::ParseError, message + " at offset " + std::to_string(offset) + " in '" +
                                           std::string(text_) + "'",
                "query:" + std::to_string(offset));
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      if (!is_word_char(c) && kSpecialChars.find(c) == std::string_view::npos) {
        ++i;  // whitespace
        continue;
      }
      Token t;
      t.offset = i;
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case '=': t.kind = Tok::Equals; break;
        case ',': t.kind = Tok::Comma; break;
        case '\\': fail("stray backslash", i);
        case '"': {
          t.kind = Tok::Quoted;
          ++i;
          bool closed = false;
          while (i < text_.size()) {
            const char d = text_[i];
            if (d == '\\') {
              if (i + 1 >= text_.size()) fail("dangling escape", i);
              t.text.push_back(text_[i + 1]);
              i += 2;
            } else if (d == '"') {
              closed = true;
              break;
            } else {
              t.text.push_back(d);
              ++i;
            }
          }
          if (!closed) fail("unterminated quoted name", t.offset);
          break;
        }
        default: {
          t.kind = Tok::Word;
          const auto start = i;
          while (i < text_.size() && is_word_char(text_[i])) ++i;
          t.text.assign(text_.substr(start, i - start));
          tokens_.push_back(std::move(t));
          continue;
        }
      }
      if (t.kind != Tok::Quoted) t.text.assign(1, c);
      ++i;
      tokens_.push_back(std::move(t));
    }
    Token end;
    end.offset = text_.size();
    end.text = "end of input";
    tokens_.push_back(std::move(end));
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Word && peek().text == kw; }
  void expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) fail("expected " + std::string(what) + ", found '" + peek().text + "'", peek().offset);
    take();
  }

  std::string name(std::string_view what) {
    const auto& t = peek();
    if (t.kind == Tok::Quoted || (t.kind == Tok::Word && !is_reserved(t.text))) return take().text;
    fail("expected " + std::string(what) + ", found '" + t.text + "'", t.offset);
  }

  std::string word(std::string_view what) {
    if (peek().kind != Tok::Word) fail("expected " + std::string(what), peek().offset);
    return take().text;
  }

  template <typename Int>
  Int integer(std::string_view what) {
    const auto t = peek();
    const auto text = word(what);
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail("expected " + std::string(what), t.offset);
    return v;
  }

  double number() {
    const auto t = peek();
    const auto text = word("number");
    std::string_view sv = text;
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size() || sv.empty()) fail("expected number", t.offset);
    return v;
  }

  using Level = Query (Parser::*)();

  Query parse_binary(Level next, std::string_view keyword, SetOp op) {
    auto left = (this->*next)();
    while (at_keyword(keyword)) {
      take();
      left = Query::combine(op, std::move(left), (this->*next)());
    }
    return left;
  }

  Query parse_or() { return parse_binary(&Parser::parse_xor, "OR", SetOp::Union); }
  Query parse_xor() { return parse_binary(&Parser::parse_diff, "XOR", SetOp::SymmetricDifference); }
  Query parse_diff() { return parse_binary(&Parser::parse_and, "DIFF", SetOp::Difference); }
  Query parse_and() { return parse_binary(&Parser::parse_unary, "AND", SetOp::Intersection); }

  Query parse_unary() {
    if (at_keyword("NOT")) {
      take();
      return Query::negate(parse_unary());
    }
    if (peek().kind == Tok::LParen) {
      take();
      auto inner = parse_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    return parse_atom();
  }

  Query parse_atom() {
    const auto& t = peek();
    if (t.kind == Tok::Word) {
      const auto& next = peek(1);
      if ((t.text == "correct" || t.text == "incorrect") && next.kind == Tok::LParen) {
        const bool correct = t.text == "correct";
        take();
        take();
        auto clf = name("classifier name");
        expect(Tok::RParen, "')'");
        return correct ? Query::correct(std::move(clf)) : Query::incorrect(std::move(clf));
      }
      if (t.text == "pred" && next.kind == Tok::LParen) {
        take();
        take();
        auto clf = name("classifier name");
        expect(Tok::RParen, "')'");
        expect(Tok::Equals, "'='");
        return Query::predicted(std::move(clf), name("label"));
      }
      if (t.text == "actual" && next.kind == Tok::Equals) {
        take();
        take();
        return Query::actual(name("label"));
      }
      if (t.text == "ncorrect" && next.kind == Tok::Equals) {
        take();
        take();
        return Query::cumulative_count(integer<std::size_t>("classifier count"));
      }
      if (t.text == "split" && next.kind == Tok::Equals) {
        take();
        take();
        const auto offset = peek().offset;
        const auto s = parse_scope(word("train, test or all"));
        if (!s) fail("split must be train, test or all", offset);
        return Query::scope(*s);
      }
      if (t.text == "ids" && next.kind == Tok::LBrace) {
        take();
        take();
        std::vector<InstanceIndex> ids;
        if (peek().kind == Tok::RBrace) {
          take();
          return Query::empty();
        }
        ids.push_back(integer<InstanceIndex>("instance index"));
        while (peek().kind == Tok::Comma) {
          take();
          ids.push_back(integer<InstanceIndex>("instance index"));
        }
        expect(Tok::RBrace, "'}'");
        return Query::instance_ids(std::move(ids));
      }
    }

    auto feature = name("query atom");
    if (peek().kind == Tok::Equals) {
      take();
      return Query::feature_equals(std::move(feature), name("category"));
    }
    if (at_keyword("in")) {
      take();
      expect(Tok::LBracket, "'['");
      const double lo = number();
      expect(Tok::Comma, "','");
      const double hi = number();
      bool closed = false;
      if (peek().kind == Tok::RBracket) {
        closed = true;
      } else if (peek().kind != Tok::RParen) {
        fail("expected ')' or ']'", peek().offset);
      }
      take();
      return Query::feature_range(std::move(feature), lo, hi, closed);
    }
    fail("expected '=' or 'in' after feature name", peek().offset);
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

template <typename Pred>
InstanceSet build_set(std::size_t n, Pred&& pred) {
  InstanceSet set(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (pred(i)) set.insert(static_cast<InstanceIndex>(i));
  }
  return set;
}

class Evaluator {
 public:
  Evaluator(const ExperimentDataset& ds, const InstanceSet& universe) : ds_(ds), universe_(universe) {}

  InstanceSet eval(const Query& q) const {
    return std::visit([&](const auto& n) { return eval_node(n); }, q.node());
  }

 private:
  InstanceSet eval_node(const ast::Empty&) const { return InstanceSet(ds_.size()); }

  InstanceSet eval_node(const ast::Correct& n) const { return match(n.classifier, true); }
  InstanceSet eval_node(const ast::Incorrect& n) const { return match(n.classifier, false); }

  InstanceSet match(const std::string& classifier, bool correct) const {
    const auto pred = ds_.predictions(ds_.require_classifier(classifier));
    const auto actual = ds_.actual();
    return build_set(ds_.size(), [&](std::size_t i) { return (pred[i] == actual[i]) == correct; });
  }

  InstanceSet eval_node(const ast::Predicted& n) const {
    const auto pred = ds_.predictions(ds_.require_classifier(n.classifier));
    const auto label = ds_.require_label(n.label);
    return build_set(ds_.size(), [&](std::size_t i) { return pred[i] == label; });
  }

  InstanceSet eval_node(const ast::Actual& n) const {
    const auto actual = ds_.actual();
    const auto label = ds_.require_label(n.label);
    return build_set(ds_.size(), [&](std::size_t i) { return actual[i] == label; });
  }

  InstanceSet eval_node(const ast::FeatureRange& n) const {
    const auto& col = ds_.feature(ds_.require_feature(n.feature));
    if (!col.continuous()) {
      throw Error(ErrorCode::InvalidQuery, "range query on categorical feature '" + n.feature + "'");
    }
    if (!(n.lo <= n.hi)) throw Error(ErrorCode::InvalidQuery, "range query on '" + n.feature + "' has lo > hi");
    const auto lo = n.lo;
    const auto hi = n.hi;
    if (n.right_closed) {
      return build_set(ds_.size(), [&](std::size_t i) {
        return col.missing[i] == 0 && col.values[i] >= lo && col.values[i] <= hi;
      });
    }
    return build_set(ds_.size(), [&](std::size_t i) {
      return col.missing[i] == 0 && col.values[i] >= lo && col.values[i] < hi;
    });
  }

  InstanceSet eval_node(const ast::FeatureEquals& n) const {
    const auto& col = ds_.feature(ds_.require_feature(n.feature));
    if (col.continuous()) {
      throw Error(ErrorCode::InvalidQuery, "category query on continuous feature '" + n.feature + "'");
    }
    const auto code = col.categories.find(n.category);
    if (!code) {
      throw Error(ErrorCode::UnknownCategory,
                  "'" + n.category + "' is not a category of feature '" + n.feature + "'");
    }
    const auto wanted = static_cast<std::uint32_t>(*code);
    return build_set(ds_.size(), [&](std::size_t i) { return col.missing[i] == 0 && col.codes[i] == wanted; });
  }

  InstanceSet eval_node(const ast::CumulativeCount& n) const {
    if (n.k > ds_.comparison_classifiers().size()) {
      throw Error(ErrorCode::InvalidQuery, "ncorrect=" + std::to_string(n.k) + " exceeds the " +
                                               std::to_string(ds_.comparison_classifiers().size()) +
                                               " compared classifiers");
    }
    const auto counts = correct_counts(ds_);
    return build_set(ds_.size(), [&](std::size_t i) { return counts[i] == n.k; });
  }

  InstanceSet eval_node(const ast::ScopeIs& n) const { return scope_set(ds_, n.scope); }

  InstanceSet eval_node(const ast::InstanceIds& n) const { return InstanceSet::from_indices(ds_.size(), n.ids); }

  InstanceSet eval_node(const ast::Combine& n) const { return boxer::combine(eval(*n.left), eval(*n.right), n.op); }

  InstanceSet eval_node(const ast::Not& n) const { return universe_ - eval(*n.operand); }

  const ExperimentDataset& ds_;
  const InstanceSet& universe_;
};

}  // namespace

std::string describe(const Query& query) {
  std::string out;
  describe_into(query, out);
  return out;
}

Query parse_query(std::string_view text) { return Parser(text).parse(); }

InstanceSet evaluate(const Query& query, const ExperimentDataset& dataset, const InstanceSet& scope_universe) {
  if (scope_universe.universe_size() != dataset.size()) {
    throw Error(ErrorCode::UniverseMismatch, "scope universe does not match dataset size");
  }
  return Evaluator(dataset, scope_universe).eval(query);
}

InstanceSet evaluate(const Query& query, const ExperimentDataset& dataset, Scope scope) {
  return evaluate(query, dataset, scope_set(dataset, scope));
}

std::vector<std::size_t> correct_counts(const ExperimentDataset& dataset) {
  std::vector<std::size_t> counts(dataset.size(), 0);
  const auto actual = dataset.actual();
  for (const auto c : dataset.comparison_classifiers()) {
    const auto pred = dataset.predictions(c);
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += pred[i] == actual[i] ? 1 : 0;
  }
  return counts;
}

}  // namespace boxer
