"""Extended-precision reference values frozen into the Rust test suite.

Run with `python3 tools/reference_values.py`. Every number is computed here
independently of the Rust code (mpmath at 40 digits, direct quadrature or
exact series sums), then pasted into the tests as literals.
"""
from mpmath import mp, mpf, sqrt, exp, pi, quad, inf, log, nsum, fac

mp.dps = 40


def freqs(lam, w0=mpf(1)):
    lam = mpf(lam)
    w1 = w0
    w2 = w0 * sqrt(1 - 2 * lam)
    ws = 2 * w1 * w2 / (w1 + w2)
    wbar = sqrt(w1 * w2)
    a = (1 - 2 * lam) ** mpf("0.25")
    z = -(1 - a) / (1 + a)
    return dict(w1=w1, w2=w2, ws=ws, wbar=wbar, z=z, xi=z * z)


def psi(lam, x1, x2):
    f = freqs(lam)
    w1, w2 = f["w1"], f["w2"]
    return (w1 * w2 / pi**2) ** mpf("0.25") * exp(
        -(x1**2 + x2**2) * (w1 + w2) / 4 - x1 * x2 * (w1 - w2) / 2
    )


def gamma_quad(lam, x, xp):
    return quad(lambda y: psi(lam, x, y) * psi(lam, xp, y), [-inf, inf])


def lhs(q, x):
    q = mpf(q)
    return x**q / (q * (x ** (2 * q - 1) - x) + (1 - q) * (1 - x ** (2 * q))) * ((1 + x) / (1 - x)) ** 3


def rhs(lam):
    f = freqs(lam)
    return mpf(lam) / (2 * f["ws"]) ** 2


def solve(lam, q):
    r = rhs(lam)
    lo, hi = mpf(0), mpf(1) - mpf("1e-12")
    for _ in range(400):
        m = (lo + hi) / 2
        if lhs(q, m) < r:
            lo = m
        else:
            hi = m
    return lo


def moment_interaction(lam, q, r, xi_p):
    """-(lam/2) * <(x1-x2)^2> of K_p, summed over Hermite matrix elements."""
    f = freqs(lam)
    ws = f["ws"]
    wp = ws * (1 + xi_p) / (1 - xi_p)
    a = lambda n: ((1 - xi_p) * xi_p**n) ** q
    b = lambda n: ((1 - xi_p) * xi_p**n) ** r
    diag = nsum(lambda n: a(n) * b(n) * (2 * n + 1), [0, inf]) / wp
    off = nsum(lambda n: (n + 1) * (a(n) * b(n + 1) + a(n + 1) * b(n)), [0, inf]) / wp
    gg = diag - off
    return -(mpf(lam) / 2) * (2 / ws - gg)


def crossing(q):
    lo, hi = mpf("0.001"), mpf("0.4999")
    g = lambda l: solve(l, q) / freqs(l)["xi"] - 1
    glo = g(lo)
    for _ in range(60):
        m = (lo + hi) / 2
        gm = g(m)
        if (gm > 0) == (glo > 0):
            lo, glo = m, gm
        else:
            hi = m
    return lo


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 17)}")


if __name__ == "__main__":
    f = freqs("0.3")
    for k in ("w2", "ws", "wbar", "z", "xi"):
        show(f"lambda=0.3 {k}", f[k])
    xi = f["xi"]
    show("E_ex(0.3)", (f["w1"] + f["w2"]) / 2)
    show("kinetic exact(0.3)", (f["w1"] + f["w2"]) / 4)
    show("external exact(0.3)", 1 / (2 * f["ws"]))
    show("interaction exact(0.3)", -mpf("0.3") / (2 * f["w2"]))
    show("density(0.3, 0)", sqrt(f["ws"] / pi))
    mu = (f["w1"] + f["w2"]) ** 2 / (4 * f["w2"])
    show("mu(0.3)", mu)
    show("V_s offset(0.3)", mu - f["ws"] / 2)
    show("E_HF(0.3)", sqrt(mpf("0.7")))
    show("P0(0.3)", 1 - xi)
    show("P1(0.3)", (1 - xi) * xi)
    show("gamma(0.3; 0.7,-0.4) quad", gamma_quad("0.3", mpf("0.7"), mpf("-0.4")))
    show("gamma(0.3; 0,0) quad", gamma_quad("0.3", 0, 0))
    s = mpf("1.2")
    show("kernel norm q=r=0.6 xi(0.3)", (1 - xi) ** s / (1 - xi**s))
    show("bracket q=0.5 xi(0.3)", 2 - (1 - sqrt(xi)) ** 2 / (1 + xi))
    show("T_p(0.3, xi)", f["ws"] / 2 * ((1 + xi) / (1 - xi)) ** 2)
    show("rhs(0.3)", rhs("0.3"))
    show("purity xi(0.3)", (1 - xi) / (1 + xi))
    show("qp weight xi(0.3)", (1 - xi) ** 2)
    show("xi(0.01)", freqs("0.01")["xi"])
    for lam in ("0.1", "0.3"):
        for q in ("0.5", "0.4"):
            q_ = mpf(q)
            for xp in (freqs(lam)["xi"], mpf("0.05")):
                show(f"interaction moment lam={lam} q={q} xi_p={mp.nstr(xp,6)}", moment_interaction(lam, q_, 1 - q_, xp))
    show("interaction moment lam=0.3 q=r=0.6 xi", moment_interaction("0.3", mpf("0.6"), mpf("0.6"), xi))
    for q in ("0.4", "0.3"):
        show(f"xi_p(0.3, q={q})", solve("0.3", q))
        show(f"xi_p(0.1, q={q})", solve("0.1", q))
        show(f"crossing q={q}", crossing(q))
