"""Pure-Python versions of the compiled sweeps (same signatures, in-place semantics)."""


def fill_forward(r, x, pair_tri, pair_edge, pair_sign, tri_edges, tri_signs):
    for t, e, s in zip(pair_tri.tolist(), pair_edge.tolist(), pair_sign.tolist()):
        v = r[e] * s
        x[t] = v
        ed, sg = tri_edges[t], tri_signs[t]
        for j in range(3):
            r[ed[j]] -= v * sg[j]


def fill_adjoint(xbar, rbar, pair_tri, pair_edge, pair_sign, tri_edges, tri_signs):
    for t, e, s in zip(pair_tri[::-1].tolist(), pair_edge[::-1].tolist(), pair_sign[::-1].tolist()):
        ed, sg = tri_edges[t], tri_signs[t]
        v = xbar[t] - (sg[0] * rbar[ed[0]] + sg[1] * rbar[ed[1]] + sg[2] * rbar[ed[2]])
        rbar[e] += s * v


def squeeze_forward(x, sig, tet, sig_sign, tet_faces, tet_signs):
    for f, t, s in zip(sig.tolist(), tet.tolist(), sig_sign.tolist()):
        v = x[f] * s
        fa, sg = tet_faces[t], tet_signs[t]
        for j in range(4):
            x[fa[j]] -= v * sg[j]


def squeeze_adjoint(z, sig, tet, sig_sign, tet_faces, tet_signs):
    for f, t, s in zip(sig[::-1].tolist(), tet[::-1].tolist(), sig_sign[::-1].tolist()):
        fa, sg = tet_faces[t], tet_signs[t]
        v = sg[0] * z[fa[0]] + sg[1] * z[fa[1]] + sg[2] * z[fa[2]] + sg[3] * z[fa[3]]
        z[f] -= s * v


def tree_forward(acc, y, order, parent, pedge, sc, sp):
    for v in order[::-1].tolist():
        w = sc[v] * acc[v]
        y[pedge[v]] = w
        acc[parent[v]] -= sp[v] * w


def tree_adjoint(y, abar, order, parent, pedge, sc, sp):
    for v in order.tolist():
        p = parent[v]
        abar[v] += sc[v] * (y[pedge[v]] - sp[v] * abar[p])
