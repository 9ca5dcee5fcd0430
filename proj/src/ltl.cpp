/*
 * Copyright (c) 2026, the sdn-evb authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sdnevb/ltl.hpp"

#include <algorithm>
#include <cctype>

namespace sdnevb {

namespace {

FormulaPtr make(LtlOp op, std::string name, FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->name = std::move(name);
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

}  // namespace

FormulaPtr ltl_true() { return make(LtlOp::True, "", nullptr, nullptr); }
FormulaPtr ltl_false() { return make(LtlOp::False, "", nullptr, nullptr); }
FormulaPtr ltl_event(std::string name) {
  return make(LtlOp::Event, std::move(name), nullptr, nullptr);
}
FormulaPtr ltl_pred(std::string name) {
  return make(LtlOp::Pred, std::move(name), nullptr, nullptr);
}
FormulaPtr ltl_not(FormulaPtr f) {
  return make(LtlOp::Not, "", std::move(f), nullptr);
}
FormulaPtr ltl_and(FormulaPtr a, FormulaPtr b) {
  return make(LtlOp::And, "", std::move(a), std::move(b));
}
FormulaPtr ltl_or(FormulaPtr a, FormulaPtr b) {
  return make(LtlOp::Or, "", std::move(a), std::move(b));
}
FormulaPtr ltl_implies(FormulaPtr a, FormulaPtr b) {
  return make(LtlOp::Implies, "", std::move(a), std::move(b));
}
FormulaPtr ltl_next(FormulaPtr f) {
  return make(LtlOp::Next, "", std::move(f), nullptr);
}
FormulaPtr ltl_future(FormulaPtr f) {
  return make(LtlOp::Future, "", std::move(f), nullptr);
}
FormulaPtr ltl_globally(FormulaPtr f) {
  return make(LtlOp::Globally, "", std::move(f), nullptr);
}
FormulaPtr ltl_until(FormulaPtr a, FormulaPtr b) {
  return make(LtlOp::Until, "", std::move(a), std::move(b));
}
FormulaPtr ltl_release(FormulaPtr a, FormulaPtr b) {
  return make(LtlOp::Release, "", std::move(a), std::move(b));
}

bool ltl_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->name != b->name) return false;
  return ltl_equal(a->lhs, b->lhs) && ltl_equal(a->rhs, b->rhs);
}

std::string print_ltl(const FormulaPtr& f) {
  switch (f->op) {
    case LtlOp::True:
      return "true";
    case LtlOp::False:
      return "false";
    case LtlOp::Event:
      return "e(" + f->name + ")";
    case LtlOp::Pred:
      return "{" + f->name + "}";
    case LtlOp::Not:
      return "!" + print_ltl(f->lhs);
    case LtlOp::Next:
      return "X " + print_ltl(f->lhs);
    case LtlOp::Future:
      return "F " + print_ltl(f->lhs);
    case LtlOp::Globally:
      return "G " + print_ltl(f->lhs);
    case LtlOp::And:
      return "(" + print_ltl(f->lhs) + " && " + print_ltl(f->rhs) + ")";
    case LtlOp::Or:
      return "(" + print_ltl(f->lhs) + " || " + print_ltl(f->rhs) + ")";
    case LtlOp::Implies:
      return "(" + print_ltl(f->lhs) + " => " + print_ltl(f->rhs) + ")";
    case LtlOp::Until:
      return "(" + print_ltl(f->lhs) + " U " + print_ltl(f->rhs) + ")";
    case LtlOp::Release:
      return "(" + print_ltl(f->lhs) + " R " + print_ltl(f->rhs) + ")";
  }
  return "";
}

namespace {

struct Token {
  enum Kind {
    LParen,
    RParen,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Ident,
    Pred,
    End,
  };
  Kind kind = End;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Token::Kind kind, std::string tok, std::size_t pos) {
    out.push_back({kind, std::move(tok), pos});
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      push(Token::LParen, "(", i++);
    } else if (c == ')') {
      push(Token::RParen, ")", i++);
    } else if (c == '!') {
      push(Token::Bang, "!", i++);
    } else if (c == '{') {
      std::size_t start = i++;
      std::string name;
      while (i < text.size() && text[i] != '}') name.push_back(text[i++]);
      if (i == text.size()) {
        throw LtlParseError("unterminated '{'", start);
      }
      ++i;
      std::string trimmed;
      for (char ch : name) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
          trimmed.push_back(ch);
        }
      }
      if (trimmed.empty()) {
        throw LtlParseError("empty predicate name", start);
      }
      push(Token::Pred, trimmed, start);
    } else if (c == '&' && i + 1 < text.size() && text[i + 1] == '&') {
      push(Token::AndAnd, "&&", i);
      i += 2;
    } else if (c == '|' && i + 1 < text.size() && text[i + 1] == '|') {
      push(Token::OrOr, "||", i);
      i += 2;
    } else if (c == '=' && i + 1 < text.size() && text[i + 1] == '>') {
      push(Token::Arrow, "=>", i);
      i += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      std::string name;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_')) {
        name.push_back(text[i++]);
      }
      push(Token::Ident, std::move(name), start);
    } else {
      throw LtlParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  push(Token::End, "", text.size());
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  FormulaPtr run() {
    FormulaPtr f = implies();
    if (peek().kind != Token::End) {
      throw LtlParseError("trailing input after formula", peek().pos);
    }
    return f;
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  Token take() { return tokens_[at_++]; }

  FormulaPtr implies() {
    FormulaPtr lhs = orExpr();
    if (peek().kind == Token::Arrow) {
      take();
      return ltl_implies(lhs, implies());
    }
    return lhs;
  }

  FormulaPtr orExpr() {
    FormulaPtr f = andExpr();
    while (peek().kind == Token::OrOr) {
      take();
      f = ltl_or(f, andExpr());
    }
    return f;
  }

  FormulaPtr andExpr() {
    FormulaPtr f = untilExpr();
    while (peek().kind == Token::AndAnd) {
      take();
      f = ltl_and(f, untilExpr());
    }
    return f;
  }

  FormulaPtr untilExpr() {
    FormulaPtr lhs = unary();
    if (peek().kind == Token::Ident && peek().text == "U") {
      take();
      return ltl_until(lhs, untilExpr());
    }
    if (peek().kind == Token::Ident && peek().text == "R") {
      take();
      return ltl_release(lhs, untilExpr());
    }
    return lhs;
  }

  FormulaPtr unary() {
    if (peek().kind == Token::Bang) {
      take();
      return ltl_not(unary());
    }
    if (peek().kind == Token::Ident) {
      if (peek().text == "X") {
        take();
        return ltl_next(unary());
      }
      if (peek().text == "F") {
        take();
        return ltl_future(unary());
      }
      if (peek().text == "G") {
        take();
        return ltl_globally(unary());
      }
    }
    return primary();
  }

  FormulaPtr primary() {
    Token tok = take();
    switch (tok.kind) {
      case Token::LParen: {
        FormulaPtr f = implies();
        if (peek().kind != Token::RParen) {
          throw LtlParseError("expected ')'", peek().pos);
        }
        take();
        return f;
      }
      case Token::Pred:
        return ltl_pred(tok.text);
      case Token::Ident:
        if (tok.text == "true") return ltl_true();
        if (tok.text == "false") return ltl_false();
        if (tok.text == "e") {
          if (peek().kind != Token::LParen) {
            throw LtlParseError("expected '(' after e", peek().pos);
          }
          take();
          if (peek().kind != Token::Ident) {
            throw LtlParseError("expected an event name", peek().pos);
          }
          std::string name = take().text;
          if (peek().kind != Token::RParen) {
            throw LtlParseError("expected ')'", peek().pos);
          }
          take();
          return ltl_event(name);
        }
        throw LtlParseError("unknown atom '" + tok.text + "'", tok.pos);
      default:
        throw LtlParseError("expected a formula", tok.pos);
    }
  }

  std::vector<Token> tokens_;
  std::size_t at_ = 0;
};

}  // namespace

FormulaPtr parse_ltl(std::string_view text) {
  return Parser(lex(text)).run();
}

namespace {

FormulaPtr nnf_neg(const FormulaPtr& f);

FormulaPtr nnf_pos(const FormulaPtr& f) {
  switch (f->op) {
    case LtlOp::True:
    case LtlOp::False:
    case LtlOp::Event:
    case LtlOp::Pred:
      return f;
    case LtlOp::Not:
      return nnf_neg(f->lhs);
    case LtlOp::And:
      return ltl_and(nnf_pos(f->lhs), nnf_pos(f->rhs));
    case LtlOp::Or:
      return ltl_or(nnf_pos(f->lhs), nnf_pos(f->rhs));
    case LtlOp::Implies:
      return ltl_or(nnf_neg(f->lhs), nnf_pos(f->rhs));
    case LtlOp::Next:
      return ltl_next(nnf_pos(f->lhs));
    case LtlOp::Future:
      return ltl_until(ltl_true(), nnf_pos(f->lhs));
    case LtlOp::Globally:
      return ltl_release(ltl_false(), nnf_pos(f->lhs));
    case LtlOp::Until:
      return ltl_until(nnf_pos(f->lhs), nnf_pos(f->rhs));
    case LtlOp::Release:
      return ltl_release(nnf_pos(f->lhs), nnf_pos(f->rhs));
  }
  return f;
}

FormulaPtr nnf_neg(const FormulaPtr& f) {
  switch (f->op) {
    case LtlOp::True:
      return ltl_false();
    case LtlOp::False:
      return ltl_true();
    case LtlOp::Event:
    case LtlOp::Pred:
      return ltl_not(f);
    case LtlOp::Not:
      return nnf_pos(f->lhs);
    case LtlOp::And:
      return ltl_or(nnf_neg(f->lhs), nnf_neg(f->rhs));
    case LtlOp::Or:
      return ltl_and(nnf_neg(f->lhs), nnf_neg(f->rhs));
    case LtlOp::Implies:
      return ltl_and(nnf_pos(f->lhs), nnf_neg(f->rhs));
    case LtlOp::Next:
      return ltl_next(nnf_neg(f->lhs));
    case LtlOp::Future:
      return ltl_release(ltl_false(), nnf_neg(f->lhs));
    case LtlOp::Globally:
      return ltl_until(ltl_true(), nnf_neg(f->lhs));
    case LtlOp::Until:
      return ltl_release(nnf_neg(f->lhs), nnf_neg(f->rhs));
    case LtlOp::Release:
      return ltl_until(nnf_neg(f->lhs), nnf_neg(f->rhs));
  }
  return f;
}

}  // namespace

FormulaPtr nnf(const FormulaPtr& f) { return nnf_pos(f); }

namespace {

void collect_atoms(const FormulaPtr& f, LtlOp op, std::set<std::string>& out) {
  if (!f) return;
  if (f->op == op) out.insert(f->name);
  collect_atoms(f->lhs, op, out);
  collect_atoms(f->rhs, op, out);
}

}  // namespace

std::set<std::string> event_atoms(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_atoms(f, LtlOp::Event, out);
  return out;
}

std::set<std::string> pred_atoms(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_atoms(f, LtlOp::Pred, out);
  return out;
}

bool BuchiEdge::satisfies(const Letter& letter, const PredMap& preds) const {
  for (const auto& name : eventsTrue) {
    if (!letter.event.has_value() || *letter.event != name) return false;
  }
  for (const auto& name : eventsFalse) {
    if (letter.event.has_value() && *letter.event == name) return false;
  }
  for (const auto& name : predsTrue) {
    if (!preds.at(name)(*letter.state)) return false;
  }
  for (const auto& name : predsFalse) {
    if (preds.at(name)(*letter.state)) return false;
  }
  return true;
}

namespace {

// Tableau node. Formula sets are keyed by printed form; the separate map
// keeps the trees around.
struct TNode {
  std::set<int> incoming;  // -1 marks the synthetic initial state
  std::map<std::string, FormulaPtr> newF, old, next;
};

void insert_new(TNode& q, const FormulaPtr& f) {
  std::string key = print_ltl(f);
  if (q.old.count(key) == 0) q.newF.emplace(std::move(key), f);
}

// Classic on-the-fly tableau expansion. Nodes agreeing on (old, next) merge.
void expand(TNode q, std::vector<TNode>& nodes) {
  if (q.newF.empty()) {
    for (auto& r : nodes) {
      auto sameKeys = [](const auto& a, const auto& b) {
        return a.size() == b.size() &&
               std::equal(a.begin(), a.end(), b.begin(),
                          [](const auto& x, const auto& y) {
                            return x.first == y.first;
                          });
      };
      if (sameKeys(r.old, q.old) && sameKeys(r.next, q.next)) {
        r.incoming.insert(q.incoming.begin(), q.incoming.end());
        return;
      }
    }
    nodes.push_back(q);
    TNode succ;
    succ.incoming = {static_cast<int>(nodes.size()) - 1};
    succ.newF = nodes.back().next;
    expand(std::move(succ), nodes);
    return;
  }
  auto it = q.newF.begin();
  std::string key = it->first;
  FormulaPtr f = it->second;
  q.newF.erase(it);
  switch (f->op) {
    case LtlOp::True:
      expand(std::move(q), nodes);
      return;
    case LtlOp::False:
      return;  // inconsistent node
    case LtlOp::Event:
    case LtlOp::Pred:
      if (q.old.count(print_ltl(ltl_not(f))) > 0) return;
      q.old.emplace(std::move(key), f);
      expand(std::move(q), nodes);
      return;
    case LtlOp::Not:
      if (q.old.count(print_ltl(f->lhs)) > 0) return;
      q.old.emplace(std::move(key), f);
      expand(std::move(q), nodes);
      return;
    case LtlOp::And:
      q.old.emplace(std::move(key), f);
      insert_new(q, f->lhs);
      insert_new(q, f->rhs);
      expand(std::move(q), nodes);
      return;
    case LtlOp::Or: {
      TNode q2 = q;
      q.old.emplace(key, f);
      insert_new(q, f->lhs);
      expand(std::move(q), nodes);
      q2.old.emplace(std::move(key), f);
      insert_new(q2, f->rhs);
      expand(std::move(q2), nodes);
      return;
    }
    case LtlOp::Next:
      q.old.emplace(key, f);
      q.next.emplace(print_ltl(f->lhs), f->lhs);
      expand(std::move(q), nodes);
      return;
    case LtlOp::Until: {
      TNode q2 = q;
      q.old.emplace(key, f);
      insert_new(q, f->lhs);
      q.next.emplace(key, f);
      expand(std::move(q), nodes);
      q2.old.emplace(std::move(key), f);
      insert_new(q2, f->rhs);
      expand(std::move(q2), nodes);
      return;
    }
    case LtlOp::Release: {
      TNode q2 = q;
      q.old.emplace(key, f);
      insert_new(q, f->rhs);
      q.next.emplace(key, f);
      expand(std::move(q), nodes);
      q2.old.emplace(std::move(key), f);
      insert_new(q2, f->lhs);
      insert_new(q2, f->rhs);
      expand(std::move(q2), nodes);
      return;
    }
    default:
      // Inputs are in negation normal form; nothing else reaches here.
      return;
  }
}

void collect_untils(const FormulaPtr& f,
                    std::map<std::string, FormulaPtr>& out) {
  if (!f) return;
  if (f->op == LtlOp::Until) out.emplace(print_ltl(f), f);
  collect_untils(f->lhs, out);
  collect_untils(f->rhs, out);
}

// The letter constraints a node imposes: its literal obligations.
BuchiEdge label_of(const TNode& node) {
  BuchiEdge edge;
  for (const auto& [key, f] : node.old) {
    if (f->op == LtlOp::Event) {
      edge.eventsTrue.insert(f->name);
    } else if (f->op == LtlOp::Pred) {
      edge.predsTrue.insert(f->name);
    } else if (f->op == LtlOp::Not && f->lhs->op == LtlOp::Event) {
      edge.eventsFalse.insert(f->lhs->name);
    } else if (f->op == LtlOp::Not && f->lhs->op == LtlOp::Pred) {
      edge.predsFalse.insert(f->lhs->name);
    }
  }
  return edge;
}

}  // namespace

BuchiAutomaton to_buchi(const FormulaPtr& f) {
  FormulaPtr g = nnf(f);
  std::vector<TNode> nodes;
  {
    TNode root;
    root.incoming = {-1};
    insert_new(root, g);
    expand(std::move(root), nodes);
  }
  std::map<std::string, FormulaPtr> untils;
  collect_untils(g, untils);

  // Generalized acceptance: one set per until, holding the nodes that do not
  // owe it (or already satisfy its right side).
  std::vector<std::vector<bool>> inSet(untils.size(),
                                       std::vector<bool>(nodes.size(), true));
  {
    int u = 0;
    for (const auto& [key, until] : untils) {
      const std::string rhsKey = print_ltl(until->rhs);
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].old.count(key) > 0 && nodes[n].old.count(rhsKey) == 0) {
          inSet[u][n] = false;
        }
      }
      ++u;
    }
  }

  const int k = static_cast<int>(untils.size());
  const int copies = std::max(k, 1);
  BuchiAutomaton out;
  // State 0 is the synthetic initial state; node n, counter c maps to
  // 1 + n*copies + c.
  auto stateId = [&](int node, int counter) {
    return 1 + node * copies + counter;
  };
  out.states.resize(1 + nodes.size() * copies);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    for (int c = 0; c < copies; ++c) {
      out.states[stateId(n, c)].accepting =
          k == 0 || (c == 0 && inSet[0][n]);
    }
  }
  auto advance = [&](int sourceNode, int counter) {
    if (k == 0) return 0;
    return inSet[counter][sourceNode] ? (counter + 1) % k : counter;
  };
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const BuchiEdge label = label_of(nodes[n]);
    for (int from : nodes[n].incoming) {
      if (from == -1) {
        BuchiEdge edge = label;
        edge.target = stateId(n, 0);
        out.states[0].edges.push_back(edge);
        continue;
      }
      for (int c = 0; c < copies; ++c) {
        BuchiEdge edge = label;
        edge.target = stateId(n, advance(from, c));
        out.states[stateId(from, c)].edges.push_back(edge);
      }
    }
  }
  return out;
}

}  // namespace sdnevb
