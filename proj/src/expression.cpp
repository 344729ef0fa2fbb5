#include "thermoisaacs/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "thermoisaacs/errors.hpp"

namespace thermoisaacs {

namespace {
bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
}  // namespace

class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, const std::map<std::string, int>& vars,
                   Expression& out)
      : text_(text), vars_(vars), out_(out) {}

  void run() {
    parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    if (out_.ops_.empty()) fail("empty expression");
    // eval() uses a fixed stack; reject programs that could outgrow it.
    int depth = 0, max_depth = 0;
    for (const auto& in : out_.ops_) {
      switch (in.op) {
        case Op::Const:
        case Op::Var: ++depth; break;
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
        case Op::Pow: case Op::Min: case Op::Max: --depth; break;
        default: break;
      }
      if (depth > max_depth) max_depth = depth;
    }
    if (max_depth > 60) fail("expression too deeply nested");
  }

 private:
  using Op = Expression::Op;

  const std::string& text_;
  const std::map<std::string, int>& vars_;
  Expression& out_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("expression error at offset " + std::to_string(pos_) +
                     " in \"" + text_ + "\": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void emit(Op op) { out_.ops_.push_back({op, 0, 0.0}); }

  void parse_expr() {
    parse_term();
    while (true) {
      if (eat('+')) {
        parse_term();
        emit(Op::Add);
      } else if (eat('-')) {
        parse_term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    while (true) {
      if (eat('*')) {
        parse_unary();
        emit(Op::Mul);
      } else if (eat('/')) {
        parse_unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (eat('-')) {
      parse_unary();
      emit(Op::Neg);
      return;
    }
    if (eat('+')) {
      parse_unary();
      return;
    }
    parse_power();
  }

  void parse_power() {
    parse_atom();
    if (eat('^')) {
      parse_unary();  // right associative, binds tighter than unary minus
      emit(Op::Pow);
    }
  }

  void parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected value");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += std::size_t(end - begin);
      out_.ops_.push_back({Op::Const, 0, v});
      return;
    }
    if (is_name_start(c)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      if (peek() == '(') {
        parse_call(name);
        return;
      }
      auto it = vars_.find(name);
      if (it == vars_.end()) fail("unknown variable '" + name + "'");
      out_.ops_.push_back({Op::Var, it->second, 0.0});
      if (it->second > out_.max_slot_) out_.max_slot_ = it->second;
      return;
    }
    if (eat('(')) {
      parse_expr();
      if (!eat(')')) fail("missing ')'");
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void parse_call(const std::string& name) {
    struct Fn {
      const char* name;
      Op op;
      int arity;
    };
    static const Fn fns[] = {
        {"sin", Op::Sin, 1}, {"cos", Op::Cos, 1},  {"exp", Op::Exp, 1},
        {"tanh", Op::Tanh, 1}, {"abs", Op::Abs, 1}, {"min", Op::Min, 2},
        {"max", Op::Max, 2},
    };
    const Fn* fn = nullptr;
    for (const auto& f : fns)
      if (name == f.name) fn = &f;
    if (!fn) fail("unknown function '" + name + "'");
    if (!eat('(')) fail("expected '('");
    parse_expr();
    for (int i = 1; i < fn->arity; ++i) {
      if (!eat(',')) fail("function '" + name + "' needs " + std::to_string(fn->arity) + " arguments");
      parse_expr();
    }
    if (eat(',')) fail("too many arguments to '" + name + "'");
    if (!eat(')')) fail("missing ')'");
    emit(fn->op);
  }
};

Expression Expression::parse(const std::string& text,
                             const std::map<std::string, int>& variables) {
  Expression e;
  e.text_ = text;
  ExpressionParser(text, variables, e).run();
  return e;
}

double Expression::eval(std::span<const double> slots) const {
  double stack[64];
  int top = -1;
  for (const Instr& in : ops_) {
    switch (in.op) {
      case Op::Const: stack[++top] = in.value; break;
      case Op::Var: stack[++top] = slots[std::size_t(in.slot)]; break;
      case Op::Add: --top; stack[top] += stack[top + 1]; break;
      case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
      case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
      case Op::Div: --top; stack[top] /= stack[top + 1]; break;
      case Op::Neg: stack[top] = -stack[top]; break;
      case Op::Pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
      case Op::Sin: stack[top] = std::sin(stack[top]); break;
      case Op::Cos: stack[top] = std::cos(stack[top]); break;
      case Op::Exp: stack[top] = std::exp(stack[top]); break;
      case Op::Tanh: stack[top] = std::tanh(stack[top]); break;
      case Op::Abs: stack[top] = std::fabs(stack[top]); break;
      case Op::Min: --top; stack[top] = std::fmin(stack[top], stack[top + 1]); break;
      case Op::Max: --top; stack[top] = std::fmax(stack[top], stack[top + 1]); break;
    }
  }
  return stack[0];
}

}  // namespace thermoisaacs
