# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled coverage kernel over packed 64-bit mask words.

Same contract as the pure-Python backend: an example holds for an atom set D
when req ⊆ D and avoid ∩ D = ∅ (inverted for negated examples), and
possible_weight bounds coverage for partial assignments din ⊆ dposs.
"""

from libc.stdint cimport uint64_t


cdef class PackedExamples:
    cdef uint64_t[::1] req
    cdef uint64_t[::1] avoid
    cdef unsigned char[::1] negated
    cdef long long[::1] weights
    cdef Py_ssize_t n
    cdef Py_ssize_t words

    def __init__(self, uint64_t[::1] req, uint64_t[::1] avoid,
                 unsigned char[::1] negated, long long[::1] weights,
                 Py_ssize_t words):
        if words <= 0:
            raise ValueError("words must be positive")
        self.req = req
        self.avoid = avoid
        self.negated = negated
        self.weights = weights
        self.words = words
        self.n = negated.shape[0]
        if req.shape[0] != self.n * words or avoid.shape[0] != self.n * words:
            raise ValueError("mask arrays must hold n*words entries")
        if weights.shape[0] != self.n:
            raise ValueError("weights must hold n entries")

    def possible_weight(self, const uint64_t[::1] din, const uint64_t[::1] dposs):
        cdef long long total = 0
        cdef Py_ssize_t i, w, base
        cdef bint possible
        for i in range(self.n):
            base = i * self.words
            if self.negated[i]:
                possible = False
                for w in range(self.words):
                    if (self.req[base + w] & ~din[w]) != 0 or \
                       (self.avoid[base + w] & dposs[w]) != 0:
                        possible = True
                        break
            else:
                possible = True
                for w in range(self.words):
                    if (self.avoid[base + w] & din[w]) != 0 or \
                       (self.req[base + w] & ~dposs[w]) != 0:
                        possible = False
                        break
            if possible:
                total += self.weights[i]
        return total

    def covered_weight(self, const uint64_t[::1] d):
        cdef long long total = 0
        cdef Py_ssize_t i, w, base
        cdef bint sat
        for i in range(self.n):
            base = i * self.words
            sat = True
            for w in range(self.words):
                if (self.req[base + w] & ~d[w]) != 0 or \
                   (self.avoid[base + w] & d[w]) != 0:
                    sat = False
                    break
            if sat != <bint>self.negated[i]:
                total += self.weights[i]
        return total

    def covered_flags(self, const uint64_t[::1] d):
        cdef Py_ssize_t i, w, base
        cdef bint sat
        out = []
        for i in range(self.n):
            base = i * self.words
            sat = True
            for w in range(self.words):
                if (self.req[base + w] & ~d[w]) != 0 or \
                   (self.avoid[base + w] & d[w]) != 0:
                    sat = False
                    break
            out.append(bool(sat != <bint>self.negated[i]))
        return out
