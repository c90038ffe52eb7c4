# cython: language_level=3
"""Compiled nearest-neighbour scoring kernels.

Same contract as _knn_numpy: squared Euclidean distance, distance ties to the
lower train index, vote ties to the smallest class id, per-fold exclusion of
classes absent from the held-out truth.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64

cdef double INF = float("inf")


cdef i64 _vote(const f64[:, ::1] train_x, const i64[::1] train_y,
               const i64[::1] train_idx, Py_ssize_t n_train,
               const f64[:, ::1] query_x, Py_ssize_t q,
               Py_ssize_t k, Py_ssize_t n_classes,
               f64[::1] dbuf, i64[::1] votebuf) noexcept nogil:
    cdef Py_ssize_t d = train_x.shape[1]
    cdef Py_ssize_t t, j, c, pick, winner
    cdef f64 acc, diff, best
    cdef i64 row
    for t in range(n_train):
        row = train_idx[t]
        acc = 0.0
        for j in range(d):
            diff = train_x[row, j] - query_x[q, j]
            acc += diff * diff
        dbuf[t] = acc
    for c in range(n_classes):
        votebuf[c] = 0
    if k > n_train:
        k = n_train
    # repeated minimum scan; strict < keeps the lowest index on ties
    for j in range(k):
        best = INF
        pick = 0
        for t in range(n_train):
            if dbuf[t] < best:
                best = dbuf[t]
                pick = t
        dbuf[pick] = INF
        votebuf[train_y[train_idx[pick]]] += 1
    winner = 0
    for c in range(1, n_classes):
        if votebuf[c] > votebuf[winner]:
            winner = c
    return winner


def knn_predict(train_x, train_y, query_x, k, n_classes):
    """Majority vote over the k nearest training samples."""
    cdef cnp.ndarray[f64, ndim=2, mode="c"] tx = np.ascontiguousarray(train_x, dtype=np.float64)
    cdef cnp.ndarray[f64, ndim=2, mode="c"] qx = np.ascontiguousarray(query_x, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] ty = np.ascontiguousarray(train_y, dtype=np.int64)
    cdef Py_ssize_t n_train = tx.shape[0]
    cdef Py_ssize_t n_query = qx.shape[0]
    cdef cnp.ndarray[i64, ndim=1] idx = np.arange(n_train, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(n_query, dtype=np.int64)
    cdef cnp.ndarray[f64, ndim=1] dbuf = np.empty(n_train, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] votebuf = np.empty(int(n_classes), dtype=np.int64)
    cdef f64[:, ::1] txv = tx
    cdef f64[:, ::1] qxv = qx
    cdef i64[::1] tyv = ty
    cdef i64[::1] idxv = idx
    cdef f64[::1] dv = dbuf
    cdef i64[::1] vv = votebuf
    cdef Py_ssize_t i, kk = int(k), nc = int(n_classes)
    with nogil:
        for i in range(n_query):
            out[i] = _vote(txv, tyv, idxv, n_train, qxv, i, kk, nc, dv, vv)
    return out


def knn_cv_errors(x, y, fold_of, n_folds, k, n_classes):
    """Cross-validated (balanced error, precision-based error) of KNN."""
    cdef cnp.ndarray[f64, ndim=2, mode="c"] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] yv = np.ascontiguousarray(y, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] fv = np.ascontiguousarray(fold_of, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t nf = int(n_folds), kk = int(k), nc = int(n_classes)
    cdef cnp.ndarray[i64, ndim=1] train_idx = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] test_idx = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[f64, ndim=1] dbuf = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] votebuf = np.empty(nc, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=2] conf = np.empty((nc, nc), dtype=np.int64)
    cdef f64[:, ::1] xm = xv
    cdef i64[::1] ym = yv
    cdef i64[::1] fm = fv
    cdef i64[::1] tr = train_idx
    cdef i64[::1] te = test_idx
    cdef f64[::1] dm = dbuf
    cdef i64[::1] vm = votebuf
    cdef i64[:, ::1] cm = conf
    cdef Py_ssize_t f, i, q, a, b, c
    cdef Py_ssize_t n_train, n_test, n_present
    cdef i64 pred, truth_count, pred_count
    cdef f64 recall_sum, prec_sum, err_sum = 0.0, assist_sum = 0.0
    with nogil:
        for f in range(nf):
            n_train = 0
            n_test = 0
            for i in range(n):
                if fm[i] == f:
                    te[n_test] = i
                    n_test += 1
                else:
                    tr[n_train] = i
                    n_train += 1
            for a in range(nc):
                for b in range(nc):
                    cm[a, b] = 0
            for q in range(n_test):
                pred = _vote(xm, ym, tr, n_train, xm, te[q], kk, nc, dm, vm)
                cm[ym[te[q]], pred] += 1
            recall_sum = 0.0
            prec_sum = 0.0
            n_present = 0
            for c in range(nc):
                truth_count = 0
                pred_count = 0
                for b in range(nc):
                    truth_count += cm[c, b]
                    pred_count += cm[b, c]
                if truth_count > 0:
                    n_present += 1
                    recall_sum += (<f64> cm[c, c]) / truth_count
                    if pred_count > 0:
                        prec_sum += (<f64> cm[c, c]) / pred_count
            if n_present > 0:
                err_sum += 1.0 - recall_sum / n_present
                assist_sum += 1.0 - prec_sum / n_present
    return err_sum / nf, assist_sum / nf
