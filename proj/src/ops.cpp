#include "gmatch/ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmatch {

namespace {

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
    std::ostringstream os;
    os << op << ": incompatible shapes " << a.shape_str() << " and "
       << b.shape_str();
    throw ShapeError(os.str());
}

[[noreturn]] void shape_fail(const char* op, const Tensor& a) {
    std::ostringstream os;
    os << op << ": unsupported shape " << a.shape_str();
    throw ShapeError(os.str());
}

void require_matrix(const char* op, const Tensor& a) {
    if (a.rank() != 2) shape_fail(op, a);
}

// C += A . B with A [m x k], B [k x n].
void mm(const double* A, const double* B, double* C, std::size_t m,
        std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* Arow = A + i * k;
        double* Crow = C + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double a = Arow[p];
            const double* Brow = B + p * n;
            for (std::size_t j = 0; j < n; ++j) Crow[j] += a * Brow[j];
        }
    }
}

// C += A . B^T with A [m x k], B [n x k].
void mm_nt(const double* A, const double* B, double* C, std::size_t m,
           std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* Arow = A + i * k;
        double* Crow = C + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* Brow = B + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += Arow[p] * Brow[p];
            Crow[j] += acc;
        }
    }
}

// C += A^T . B with A [k x m], B [k x n].
void mm_tn(const double* A, const double* B, double* C, std::size_t k,
           std::size_t m, std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) {
        const double* Arow = A + p * m;
        const double* Brow = B + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = Arow[i];
            double* Crow = C + i * n;
            for (std::size_t j = 0; j < n; ++j) Crow[j] += a * Brow[j];
        }
    }
}

struct TrackInfo {
    Tape* tape = nullptr;
    bool a = false;
    bool b = false;
    explicit operator bool() const { return a || b; }
};

TrackInfo track(const Tensor& a) {
    TrackInfo t;
    t.tape = Tape::active();
    if (t.tape) t.a = t.tape->tracked(a);
    return t;
}

TrackInfo track(const Tensor& a, const Tensor& b) {
    TrackInfo t;
    t.tape = Tape::active();
    if (t.tape) {
        t.a = t.tape->tracked(a);
        t.b = t.tape->tracked(b);
    }
    return t;
}

void attach(Tensor& out, Tape* tape, Tape::BackFn back) {
    out.node = tape->record(out.size(), std::move(back));
    out.tape_serial = tape->serial();
    out.requires_grad = true;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_matrix("matmul", a);
    require_matrix("matmul", b);
    if (a.cols() != b.rows()) shape_fail("matmul", a, b);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = Tensor::zeros({m, n});
    mm(a.values.data(), b.values.data(), out.values.data(), m, k, n);
    auto tr = track(a, b);
    if (!tr) return out;
    const int na = a.node, nb = b.node;
    const bool ta = tr.a, tb = tr.b;
    std::vector<double> av, bv;
    if (tb) av = a.values;
    if (ta) bv = b.values;
    attach(out, tr.tape,
           [=, av = std::move(av), bv = std::move(bv)](
               const std::vector<double>& og, Tape& t) {
               if (ta) mm_nt(og.data(), bv.data(), t.grad_buf(na).data(), m, n, k);
               if (tb) mm_tn(av.data(), og.data(), t.grad_buf(nb).data(), m, k, n);
           });
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require_matrix("matmul_nt", a);
    require_matrix("matmul_nt", b);
    if (a.cols() != b.cols()) shape_fail("matmul_nt", a, b);
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    Tensor out = Tensor::zeros({m, n});
    mm_nt(a.values.data(), b.values.data(), out.values.data(), m, k, n);
    auto tr = track(a, b);
    if (!tr) return out;
    const int na = a.node, nb = b.node;
    const bool ta = tr.a, tb = tr.b;
    std::vector<double> av, bv;
    if (tb) av = a.values;
    if (ta) bv = b.values;
    attach(out, tr.tape,
           [=, av = std::move(av), bv = std::move(bv)](
               const std::vector<double>& og, Tape& t) {
               if (ta) mm(og.data(), bv.data(), t.grad_buf(na).data(), m, n, k);
               if (tb) mm_tn(og.data(), av.data(), t.grad_buf(nb).data(), m, n, k);
           });
    return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    require_matrix("matmul_tn", a);
    require_matrix("matmul_tn", b);
    if (a.rows() != b.rows()) shape_fail("matmul_tn", a, b);
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    Tensor out = Tensor::zeros({m, n});
    mm_tn(a.values.data(), b.values.data(), out.values.data(), k, m, n);
    auto tr = track(a, b);
    if (!tr) return out;
    const int na = a.node, nb = b.node;
    const bool ta = tr.a, tb = tr.b;
    std::vector<double> av, bv;
    if (tb) av = a.values;
    if (ta) bv = b.values;
    attach(out, tr.tape,
           [=, av = std::move(av), bv = std::move(bv)](
               const std::vector<double>& og, Tape& t) {
               if (ta) mm_nt(bv.data(), og.data(), t.grad_buf(na).data(), k, n, m);
               if (tb) mm(av.data(), og.data(), t.grad_buf(nb).data(), k, m, n);
           });
    return out;
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    require_matrix("matvec", a);
    if (x.rank() != 1 || x.size() != a.cols()) shape_fail("matvec", a, x);
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = Tensor::zeros({m});
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a.values[i * n + j] * x.values[j];
        out.values[i] = acc;
    }
    auto tr = track(a, x);
    if (!tr) return out;
    const int na = a.node, nx = x.node;
    const bool ta = tr.a, tx = tr.b;
    std::vector<double> av, xv;
    if (tx) av = a.values;
    if (ta) xv = x.values;
    attach(out, tr.tape,
           [=, av = std::move(av), xv = std::move(xv)](
               const std::vector<double>& og, Tape& t) {
               if (ta) {
                   auto& ga = t.grad_buf(na);
                   for (std::size_t i = 0; i < m; ++i)
                       for (std::size_t j = 0; j < n; ++j)
                           ga[i * n + j] += og[i] * xv[j];
               }
               if (tx) {
                   auto& gx = t.grad_buf(nx);
                   for (std::size_t i = 0; i < m; ++i)
                       for (std::size_t j = 0; j < n; ++j)
                           gx[j] += av[i * n + j] * og[i];
               }
           });
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    const bool broadcast =
        a.rank() == 2 && b.rank() == 1 && b.size() == a.cols();
    if (!broadcast && a.shape != b.shape) shape_fail("add", a, b);
    Tensor out = a;
    out.node = -1;
    out.tape_serial = 0;
    out.requires_grad = false;
    if (broadcast) {
        const std::size_t m = a.rows(), n = a.cols();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) out.values[i * n + j] += b.values[j];
    } else {
        for (std::size_t i = 0; i < a.size(); ++i) out.values[i] += b.values[i];
    }
    auto tr = track(a, b);
    if (!tr) return out;
    const int na = a.node, nb = b.node;
    const bool ta = tr.a, tb = tr.b;
    const std::size_t bn = b.size();
    attach(out, tr.tape, [=](const std::vector<double>& og, Tape& t) {
        if (ta) {
            auto& ga = t.grad_buf(na);
            for (std::size_t i = 0; i < og.size(); ++i) ga[i] += og[i];
        }
        if (tb) {
            auto& gb = t.grad_buf(nb);
            if (broadcast) {
                for (std::size_t i = 0; i < og.size(); ++i) gb[i % bn] += og[i];
            } else {
                for (std::size_t i = 0; i < og.size(); ++i) gb[i] += og[i];
            }
        }
    });
    return out;
}

Tensor elem_mul(const Tensor& a, const Tensor& b) {
    if (a.shape != b.shape) shape_fail("elem_mul", a, b);
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i)
        out.values[i] = a.values[i] * b.values[i];
    auto tr = track(a, b);
    if (!tr) return out;
    const int na = a.node, nb = b.node;
    const bool ta = tr.a, tb = tr.b;
    std::vector<double> av, bv;
    if (tb) av = a.values;
    if (ta) bv = b.values;
    attach(out, tr.tape,
           [=, av = std::move(av), bv = std::move(bv)](
               const std::vector<double>& og, Tape& t) {
               if (ta) {
                   auto& ga = t.grad_buf(na);
                   for (std::size_t i = 0; i < og.size(); ++i) ga[i] += og[i] * bv[i];
               }
               if (tb) {
                   auto& gb = t.grad_buf(nb);
                   for (std::size_t i = 0; i < og.size(); ++i) gb[i] += og[i] * av[i];
               }
           });
    return out;
}

Tensor relu(const Tensor& a) {
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i)
        out.values[i] = a.values[i] > 0.0 ? a.values[i] : 0.0;
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    std::vector<double> av = a.values;
    attach(out, tr.tape,
           [=, av = std::move(av)](const std::vector<double>& og, Tape& t) {
               auto& ga = t.grad_buf(na);
               for (std::size_t i = 0; i < og.size(); ++i)
                   if (av[i] > 0.0) ga[i] += og[i];
           });
    return out;
}

Tensor elem_log(const Tensor& a) {
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.values[i] <= 0.0) throw ValueError("log of non-positive value");
        out.values[i] = std::log(a.values[i]);
    }
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    std::vector<double> av = a.values;
    attach(out, tr.tape,
           [=, av = std::move(av)](const std::vector<double>& og, Tape& t) {
               auto& ga = t.grad_buf(na);
               for (std::size_t i = 0; i < og.size(); ++i) ga[i] += og[i] / av[i];
           });
    return out;
}

Tensor elem_exp(const Tensor& a) {
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = std::exp(a.values[i]);
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    std::vector<double> ov = out.values;
    attach(out, tr.tape,
           [=, ov = std::move(ov)](const std::vector<double>& og, Tape& t) {
               auto& ga = t.grad_buf(na);
               for (std::size_t i = 0; i < og.size(); ++i) ga[i] += og[i] * ov[i];
           });
    return out;
}

Tensor row_softmax(const Tensor& a) {
    require_matrix("row_softmax", a);
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.values.data() + i * n;
        double* orow = out.values.data() + i * n;
        double mx = row[0];
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            orow[j] = std::exp(row[j] - mx);
            s += orow[j];
        }
        for (std::size_t j = 0; j < n; ++j) orow[j] /= s;
    }
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    std::vector<double> ov = out.values;
    attach(out, tr.tape,
           [=, ov = std::move(ov)](const std::vector<double>& og, Tape& t) {
               auto& ga = t.grad_buf(na);
               for (std::size_t i = 0; i < m; ++i) {
                   const double* y = ov.data() + i * n;
                   const double* go = og.data() + i * n;
                   double inner = 0.0;
                   for (std::size_t j = 0; j < n; ++j) inner += go[j] * y[j];
                   double* g = ga.data() + i * n;
                   for (std::size_t j = 0; j < n; ++j)
                       g[j] += (go[j] - inner) * y[j];
               }
           });
    return out;
}

Tensor sum_all(const Tensor& a) {
    double s = 0.0;
    for (double v : a.values) s += v;
    Tensor out = Tensor::scalar(s);
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    attach(out, tr.tape, [=](const std::vector<double>& og, Tape& t) {
        auto& ga = t.grad_buf(na);
        for (double& g : ga) g += og[0];
    });
    return out;
}

Tensor mean_all(const Tensor& a) {
    if (a.size() == 0) throw ShapeError("mean of empty tensor");
    double s = 0.0;
    for (double v : a.values) s += v;
    const double inv = 1.0 / static_cast<double>(a.size());
    Tensor out = Tensor::scalar(s * inv);
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    attach(out, tr.tape, [=](const std::vector<double>& og, Tape& t) {
        auto& ga = t.grad_buf(na);
        for (double& g : ga) g += og[0] * inv;
    });
    return out;
}

Tensor mean_rows(const Tensor& a) {
    require_matrix("mean_rows", a);
    const std::size_t m = a.rows(), n = a.cols();
    if (m == 0) throw ShapeError("mean_rows of empty matrix");
    Tensor out = Tensor::zeros({n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.values[j] += a.values[i * n + j];
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < n; ++j) out.values[j] *= inv;
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    attach(out, tr.tape, [=](const std::vector<double>& og, Tape& t) {
        auto& ga = t.grad_buf(na);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += og[j] * inv;
    });
    return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols of nothing");
    const std::size_t m = parts.front().rank() == 2 ? parts.front().rows() : 0;
    std::size_t total = 0;
    for (const Tensor& p : parts) {
        require_matrix("concat_cols", p);
        if (p.rows() != m) shape_fail("concat_cols", parts.front(), p);
        total += p.cols();
    }
    Tensor out = Tensor::zeros({m, total});
    std::size_t off = 0;
    for (const Tensor& p : parts) {
        const std::size_t w = p.cols();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j)
                out.values[i * total + off + j] = p.values[i * w + j];
        off += w;
    }
    Tape* tape = Tape::active();
    if (!tape) return out;
    struct Piece {
        int node;
        std::size_t offset;
        std::size_t width;
    };
    std::vector<Piece> tracked_pieces;
    off = 0;
    for (const Tensor& p : parts) {
        if (tape->tracked(p)) tracked_pieces.push_back({p.node, off, p.cols()});
        off += p.cols();
    }
    if (tracked_pieces.empty()) return out;
    attach(out, tape,
           [=, pieces = std::move(tracked_pieces)](
               const std::vector<double>& og, Tape& t) {
               for (const Piece& pc : pieces) {
                   auto& g = t.grad_buf(pc.node);
                   for (std::size_t i = 0; i < m; ++i)
                       for (std::size_t j = 0; j < pc.width; ++j)
                           g[i * pc.width + j] += og[i * total + pc.offset + j];
               }
           });
    return out;
}

Tensor dot(const Tensor& u, const Tensor& v) {
    if (u.rank() != 1 || v.rank() != 1 || u.size() != v.size())
        shape_fail("dot", u, v);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.values[i] * v.values[i];
    Tensor out = Tensor::scalar(s);
    auto tr = track(u, v);
    if (!tr) return out;
    const int nu = u.node, nv = v.node;
    const bool tu = tr.a, tv = tr.b;
    std::vector<double> uv, vv;
    if (tv) uv = u.values;
    if (tu) vv = v.values;
    attach(out, tr.tape,
           [=, uv = std::move(uv), vv = std::move(vv)](
               const std::vector<double>& og, Tape& t) {
               if (tu) {
                   auto& g = t.grad_buf(nu);
                   for (std::size_t i = 0; i < g.size(); ++i) g[i] += og[0] * vv[i];
               }
               if (tv) {
                   auto& g = t.grad_buf(nv);
                   for (std::size_t i = 0; i < g.size(); ++i) g[i] += og[0] * uv[i];
               }
           });
    return out;
}

Tensor cosine_similarity(const Tensor& u, const Tensor& v) {
    if (u.rank() != 1 || v.rank() != 1 || u.size() != v.size())
        shape_fail("cosine_similarity", u, v);
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u.values[i] * u.values[i];
        vv += v.values[i] * v.values[i];
        uv += u.values[i] * v.values[i];
    }
    if (uu == 0.0 || vv == 0.0) throw ValueError("degenerate cosine input");
    const double nu_ = std::sqrt(uu), nv_ = std::sqrt(vv);
    const double c = uv / (nu_ * nv_);
    Tensor out = Tensor::scalar(c);
    auto tr = track(u, v);
    if (!tr) return out;
    const int iu = u.node, iv = v.node;
    const bool tu = tr.a, tv = tr.b;
    std::vector<double> ucopy = u.values, vcopy = v.values;
    attach(out, tr.tape,
           [=, ucopy = std::move(ucopy), vcopy = std::move(vcopy)](
               const std::vector<double>& og, Tape& t) {
               // d c / d u = v/(|u||v|) - c u/|u|^2, symmetrically for v.
               if (tu) {
                   auto& g = t.grad_buf(iu);
                   for (std::size_t i = 0; i < g.size(); ++i)
                       g[i] += og[0] * (vcopy[i] / (nu_ * nv_) -
                                        c * ucopy[i] / (nu_ * nu_));
               }
               if (tv) {
                   auto& g = t.grad_buf(iv);
                   for (std::size_t i = 0; i < g.size(); ++i)
                       g[i] += og[0] * (ucopy[i] / (nu_ * nv_) -
                                        c * vcopy[i] / (nv_ * nv_));
               }
           });
    return out;
}

Tensor l2_normalize_rows(const Tensor& a) {
    require_matrix("l2_normalize_rows", a);
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = Tensor::zeros(a.shape);
    std::vector<double> norms(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = a.values[i * n + j];
            s += v * v;
        }
        if (s == 0.0) throw ValueError("degenerate cosine input");
        norms[i] = std::sqrt(s);
        for (std::size_t j = 0; j < n; ++j)
            out.values[i * n + j] = a.values[i * n + j] / norms[i];
    }
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    std::vector<double> ov = out.values;
    attach(out, tr.tape,
           [=, ov = std::move(ov), norms = std::move(norms)](
               const std::vector<double>& og, Tape& t) {
               auto& ga = t.grad_buf(na);
               for (std::size_t i = 0; i < m; ++i) {
                   const double* y = ov.data() + i * n;
                   const double* go = og.data() + i * n;
                   double inner = 0.0;
                   for (std::size_t j = 0; j < n; ++j) inner += go[j] * y[j];
                   double* g = ga.data() + i * n;
                   for (std::size_t j = 0; j < n; ++j)
                       g[j] += (go[j] - inner * y[j]) / norms[i];
               }
           });
    return out;
}

Tensor normalize_cols(const Tensor& a) {
    require_matrix("normalize_cols", a);
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> colsum(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) colsum[j] += a.values[i * n + j];
    for (std::size_t j = 0; j < n; ++j) {
        if (colsum[j] <= 0.0)
            throw ValueError("normalize_cols requires positive column sums");
    }
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.values[i * n + j] = a.values[i * n + j] / colsum[j];
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    std::vector<double> ov = out.values;
    attach(out, tr.tape,
           [=, ov = std::move(ov), colsum = std::move(colsum)](
               const std::vector<double>& og, Tape& t) {
               auto& ga = t.grad_buf(na);
               for (std::size_t j = 0; j < n; ++j) {
                   double inner = 0.0;
                   for (std::size_t i = 0; i < m; ++i)
                       inner += og[i * n + j] * ov[i * n + j];
                   for (std::size_t i = 0; i < m; ++i)
                       ga[i * n + j] += (og[i * n + j] - inner) / colsum[j];
               }
           });
    return out;
}

Tensor mse(const Tensor& a, const Tensor& b) {
    if (a.shape != b.shape) shape_fail("mse", a, b);
    const std::size_t n = a.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    const double inv = 1.0 / static_cast<double>(n);
    Tensor out = Tensor::scalar(s * inv);
    auto tr = track(a, b);
    if (!tr) return out;
    const int na = a.node, nb = b.node;
    const bool ta = tr.a, tb = tr.b;
    std::vector<double> av = a.values, bv = b.values;
    attach(out, tr.tape,
           [=, av = std::move(av), bv = std::move(bv)](
               const std::vector<double>& og, Tape& t) {
               for (std::size_t i = 0; i < n; ++i) {
                   const double d = 2.0 * (av[i] - bv[i]) * inv * og[0];
                   if (ta) t.grad_buf(na)[i] += d;
                   if (tb) t.grad_buf(nb)[i] -= d;
               }
           });
    return out;
}

namespace {

// Stable elementwise binary cross-entropy on a logit.
inline double bce_term(double x, double tgt) {
    return std::max(x, 0.0) - x * tgt + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets) {
    if (logits.shape != targets.shape) shape_fail("bce_with_logits", logits, targets);
    const std::size_t n = logits.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += bce_term(logits.values[i], targets.values[i]);
    const double inv = 1.0 / static_cast<double>(n);
    Tensor out = Tensor::scalar(s * inv);
    auto tr = track(logits, targets);
    if (!tr) return out;
    const int nl = logits.node, nt = targets.node;
    const bool tl = tr.a, tt = tr.b;
    std::vector<double> lv = logits.values, tv = targets.values;
    attach(out, tr.tape,
           [=, lv = std::move(lv), tv = std::move(tv)](
               const std::vector<double>& og, Tape& t) {
               for (std::size_t i = 0; i < n; ++i) {
                   if (tl)
                       t.grad_buf(nl)[i] +=
                           og[0] * inv * (sigmoid(lv[i]) - tv[i]);
                   if (tt) t.grad_buf(nt)[i] += og[0] * inv * (-lv[i]);
               }
           });
    return out;
}

Tensor bce_with_logits_masked(const Tensor& logits, const Tensor& targets,
                              const std::vector<double>& weights) {
    if (logits.shape != targets.shape) shape_fail("bce_with_logits_masked", logits, targets);
    if (weights.size() != logits.size())
        throw ShapeError("bce_with_logits_masked: weight count mismatch");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (wsum <= 0.0) throw ValueError("no observed tasks");
    const std::size_t n = logits.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += weights[i] * bce_term(logits.values[i], targets.values[i]);
    Tensor out = Tensor::scalar(s / wsum);
    auto tr = track(logits, targets);
    if (!tr) return out;
    const int nl = logits.node;
    const bool tl = tr.a;
    if (tr.b) throw ConfigError("bce_with_logits_masked: targets must be constant");
    if (!tl) return out;
    std::vector<double> lv = logits.values, tv = targets.values, wv = weights;
    attach(out, tr.tape,
           [=, lv = std::move(lv), tv = std::move(tv), wv = std::move(wv)](
               const std::vector<double>& og, Tape& t) {
               auto& g = t.grad_buf(nl);
               for (std::size_t i = 0; i < n; ++i)
                   g[i] += og[0] * wv[i] * (sigmoid(lv[i]) - tv[i]) / wsum;
           });
    return out;
}

Tensor scalar_scale(const Tensor& a, double c) {
    Tensor out = Tensor::zeros(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = c * a.values[i];
    auto tr = track(a);
    if (!tr) return out;
    const int na = a.node;
    attach(out, tr.tape, [=](const std::vector<double>& og, Tape& t) {
        auto& ga = t.grad_buf(na);
        for (std::size_t i = 0; i < og.size(); ++i) ga[i] += c * og[i];
    });
    return out;
}

Tensor stack_scalars(const std::vector<Tensor>& scalars) {
    if (scalars.empty()) throw ShapeError("stack_scalars of nothing");
    Tensor out = Tensor::zeros({scalars.size()});
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        if (!scalars[i].is_scalar()) shape_fail("stack_scalars", scalars[i]);
        out.values[i] = scalars[i].values[0];
    }
    Tape* tape = Tape::active();
    if (!tape) return out;
    std::vector<std::pair<std::size_t, int>> tracked_nodes;
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        if (tape->tracked(scalars[i])) tracked_nodes.emplace_back(i, scalars[i].node);
    }
    if (tracked_nodes.empty()) return out;
    attach(out, tape,
           [nodes = std::move(tracked_nodes)](const std::vector<double>& og,
                                              Tape& t) {
               for (const auto& [pos, node] : nodes) t.grad_buf(node)[0] += og[pos];
           });
    return out;
}

Tensor logsumexp(const Tensor& v) {
    if (v.rank() != 1 || v.size() == 0) shape_fail("logsumexp", v);
    double mx = v.values[0];
    for (double x : v.values) mx = std::max(mx, x);
    double s = 0.0;
    std::vector<double> soft(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        soft[i] = std::exp(v.values[i] - mx);
        s += soft[i];
    }
    for (double& x : soft) x /= s;
    Tensor out = Tensor::scalar(mx + std::log(s));
    auto tr = track(v);
    if (!tr) return out;
    const int nv = v.node;
    attach(out, tr.tape,
           [=, soft = std::move(soft)](const std::vector<double>& og, Tape& t) {
               auto& g = t.grad_buf(nv);
               for (std::size_t i = 0; i < g.size(); ++i) g[i] += og[0] * soft[i];
           });
    return out;
}

}  // namespace gmatch
