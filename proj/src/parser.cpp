#include "nanolog/parser.hpp"

#include <cctype>
#include <optional>

namespace nanolog {

namespace {

enum class Tok { Var, Ident, LParen, RParen, Comma, Period, Neck, End, Invalid };

struct Token {
    Tok kind;
    std::string_view text;
    SourcePosition pos;
};

bool is_tail_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_blanks();
        SourcePosition start = pos_;
        if (i_ >= src_.size()) return {Tok::End, {}, start};

        char c = src_[i_];
        auto single = [&](Tok kind) {
            advance(1);
            return Token{kind, src_.substr(i_ - 1, 1), start};
        };
        switch (c) {
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case ',': return single(Tok::Comma);
            case '.': return single(Tok::Period);
            case ':':
                if (i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
                    advance(2);
                    return {Tok::Neck, src_.substr(i_ - 2, 2), start};
                }
                return single(Tok::Invalid);
            default: break;
        }
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) {
            std::size_t begin = i_;
            advance(1);
            while (i_ < src_.size() && is_tail_char(src_[i_])) advance(1);
            return {c <= 'Z' ? Tok::Var : Tok::Ident, src_.substr(begin, i_ - begin), start};
        }
        return single(Tok::Invalid);
    }

private:
    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n && i_ < src_.size(); ++k, ++i_) {
            if (src_[i_] == '\n') {
                ++pos_.line;
                pos_.column = 1;
            } else {
                ++pos_.column;
            }
        }
    }

    void skip_blanks() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (c == '%') {
                while (i_ < src_.size() && src_[i_] != '\n') advance(1);
            } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
                advance(1);
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    SourcePosition pos_;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Var: return "variable '" + std::string(t.text) + "'";
        case Tok::Ident: return "identifier '" + std::string(t.text) + "'";
        default: return "'" + std::string(t.text) + "'";
    }
}

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src), tok_(lex_.next()) {}

    bool at(Tok kind) const { return tok_.kind == kind; }
    bool at_end() const { return at(Tok::End); }

    [[noreturn]] void fail(std::string expected) const {
        throw ParseError(tok_.pos, std::move(expected), describe(tok_));
    }

    void expect(Tok kind, const char* what) {
        if (!at(kind)) fail(what);
        bump();
    }

    void expect_end() {
        if (!at_end()) fail("end of input");
    }

    Term term() {
        if (at(Tok::Var)) {
            Term v = Term::variable(std::string(tok_.text));
            bump();
            return v;
        }
        if (!at(Tok::Ident)) fail("term");

        std::string functor(tok_.text);
        bump();
        if (!at(Tok::LParen)) return Term::compound(std::move(functor));
        bump();
        std::vector<Term> args;
        args.push_back(term());
        while (at(Tok::Comma)) {
            bump();
            args.push_back(term());
        }
        if (!at(Tok::RParen)) fail("',' or ')'");
        bump();
        return Term::compound(std::move(functor), std::move(args));
    }

    Rule rule() {
        SourcePosition head_pos = tok_.pos;
        Term head = term();
        std::vector<Term> body;
        if (at(Tok::Neck)) {
            bump();
            body.push_back(term());
            while (at(Tok::Comma)) {
                bump();
                body.push_back(term());
            }
            expect(Tok::Period, "',' or '.'");
        } else {
            expect(Tok::Period, "':-' or '.'");
        }
        if (head.is_variable()) {
            throw Error(ErrorKind::BareVariableHead,
                        std::to_string(head_pos.line) + ":" + std::to_string(head_pos.column) +
                            ": rule head must not be a variable, found '" + head.name() + "'",
                        head_pos);
        }
        return Rule(std::move(head), std::move(body));
    }

    std::vector<Term> query() {
        std::vector<Term> goals;
        goals.push_back(term());
        while (at(Tok::Comma)) {
            bump();
            goals.push_back(term());
        }
        if (at(Tok::Period)) {
            bump();
            expect_end();
        } else if (!at_end()) {
            fail("',', '.' or end of input");
        }
        return goals;
    }

private:
    void bump() { tok_ = lex_.next(); }

    Lexer lex_;
    Token tok_;
};

}  // namespace

Term parse_term(std::string_view src) {
    Parser p(src);
    Term t = p.term();
    p.expect_end();
    return t;
}

Rule parse_rule(std::string_view src) {
    Parser p(src);
    Rule r = p.rule();
    p.expect_end();
    return r;
}

Program parse_program(std::string_view src) {
    Parser p(src);
    Program prog;
    while (!p.at_end()) prog.push_back(p.rule());
    return prog;
}

std::vector<Term> parse_query(std::string_view src) {
    Parser p(src);
    return p.query();
}

}  // namespace nanolog
