# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled ordered-multiset backends for machine ints and doubles.

Same blocked layout and API as the pure counted_set module; the backend
module picks these up at import time when the extension built.
"""

from cython.operator cimport dereference as deref
from libc.stdint cimport int64_t
from libcpp.vector cimport vector

cdef Py_ssize_t TARGET_BLOCK = 256
cdef Py_ssize_t SPLIT_AT = 512
cdef Py_ssize_t MERGE_BELOW = 64


cdef inline Py_ssize_t _lower_i(vector[int64_t]& blk, int64_t key):
    cdef Py_ssize_t lo = 0, hi = blk.size(), mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if blk[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _upper_i(vector[int64_t]& blk, int64_t key):
    cdef Py_ssize_t lo = 0, hi = blk.size(), mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if blk[mid] <= key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _lower_f(vector[double]& blk, double key):
    cdef Py_ssize_t lo = 0, hi = blk.size(), mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if blk[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _upper_f(vector[double]& blk, double key):
    cdef Py_ssize_t lo = 0, hi = blk.size(), mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if blk[mid] <= key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef class CountedSetI64:
    """Counted ordered multiset over 64-bit signed integer keys."""

    cdef vector[vector[int64_t]] blocks
    cdef vector[int64_t] mins
    cdef vector[Py_ssize_t] fen
    cdef Py_ssize_t n

    def __cinit__(self):
        self.fen.assign(1, 0)
        self.n = 0

    cdef void _fen_rebuild(self):
        cdef Py_ssize_t nb = self.blocks.size(), i, j
        self.fen.assign(nb + 1, 0)
        for i in range(1, nb + 1):
            self.fen[i] += <Py_ssize_t> self.blocks[i - 1].size()
            j = i + (i & -i)
            if j <= nb:
                self.fen[j] += self.fen[i]

    cdef void _fen_add(self, Py_ssize_t i, Py_ssize_t delta):
        cdef Py_ssize_t nb = self.fen.size() - 1
        i += 1
        while i <= nb:
            self.fen[i] += delta
            i += i & -i

    cdef Py_ssize_t _fen_prefix(self, Py_ssize_t k):
        cdef Py_ssize_t total = 0
        while k > 0:
            total += self.fen[k]
            k -= k & -k
        return total

    cdef Py_ssize_t _dir_le(self, int64_t key):
        # last directory index whose min <= key
        cdef Py_ssize_t lo = 0, hi = self.mins.size(), mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.mins[mid] <= key:
                lo = mid + 1
            else:
                hi = mid
        return lo - 1

    cdef Py_ssize_t _dir_lt(self, int64_t key):
        cdef Py_ssize_t lo = 0, hi = self.mins.size(), mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.mins[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        return lo - 1

    def insert(self, key):
        cdef int64_t k = key
        cdef Py_ssize_t i, pos, half
        cdef vector[int64_t]* blk
        cdef vector[int64_t] right
        if self.blocks.size() == 0:
            right.push_back(k)
            self.blocks.push_back(right)
            self.mins.push_back(k)
            self._fen_rebuild()
            self.n = 1
            return
        i = self._dir_le(k)
        if i < 0:
            i = 0
        blk = &self.blocks[i]
        pos = _upper_i(deref(blk), k)
        blk.insert(blk.begin() + pos, k)
        if k < self.mins[i]:
            self.mins[i] = k
        self.n += 1
        if <Py_ssize_t> blk.size() >= SPLIT_AT:
            half = <Py_ssize_t> blk.size() >> 1
            right.assign(blk.begin() + half, blk.end())
            blk.resize(half)
            self.blocks.insert(self.blocks.begin() + i + 1, right)
            self.mins.insert(self.mins.begin() + i + 1, right[0])
            self._fen_rebuild()
        else:
            self._fen_add(i, 1)

    def delete(self, key):
        cdef int64_t k = key
        cdef Py_ssize_t i, j, pos, lo, hi
        cdef vector[int64_t]* blk
        if self.blocks.size() == 0:
            raise KeyError(key)
        i = self._dir_le(k)
        if i < 0:
            raise KeyError(key)
        blk = &self.blocks[i]
        pos = _lower_i(deref(blk), k)
        if pos == <Py_ssize_t> blk.size() or deref(blk)[pos] != k:
            raise KeyError(key)
        blk.erase(blk.begin() + pos)
        self.n -= 1
        if blk.size() == 0:
            self.blocks.erase(self.blocks.begin() + i)
            self.mins.erase(self.mins.begin() + i)
            self._fen_rebuild()
            return
        if pos == 0:
            self.mins[i] = deref(blk)[0]
        if <Py_ssize_t> blk.size() < MERGE_BELOW and self.blocks.size() > 1:
            j = i - 1 if i > 0 else i + 1
            if <Py_ssize_t> (self.blocks[j].size() + blk.size()) < SPLIT_AT:
                lo, hi = (j, i) if j < i else (i, j)
                self.blocks[lo].insert(
                    self.blocks[lo].end(),
                    self.blocks[hi].begin(),
                    self.blocks[hi].end(),
                )
                self.blocks.erase(self.blocks.begin() + hi)
                self.mins.erase(self.mins.begin() + hi)
                self._fen_rebuild()
                return
        self._fen_add(i, -1)

    def __len__(self):
        return self.n

    def __contains__(self, key):
        cdef int64_t k = key
        cdef Py_ssize_t i, pos
        if self.blocks.size() == 0:
            return False
        i = self._dir_le(k)
        if i < 0:
            return False
        pos = _lower_i(self.blocks[i], k)
        return pos < <Py_ssize_t> self.blocks[i].size() and self.blocks[i][pos] == k

    def rank_lt(self, key):
        """Stored keys strictly below ``key``."""
        cdef int64_t k = key
        cdef Py_ssize_t i = self._dir_lt(k)
        if i < 0:
            return 0
        return self._fen_prefix(i) + _lower_i(self.blocks[i], k)

    def rank_le(self, key):
        """Stored keys at or below ``key``."""
        cdef int64_t k = key
        cdef Py_ssize_t i = self._dir_le(k)
        if i < 0:
            return 0
        return self._fen_prefix(i) + _upper_i(self.blocks[i], k)

    def count_range(self, lo, hi):
        """Exact number of stored keys in the closed range [lo, hi]."""
        cdef int64_t clo = lo, chi = hi
        cdef Py_ssize_t i, j, below_lo, upto_hi
        if self.blocks.size() == 0 or clo > chi:
            return 0
        i = self._dir_lt(clo)
        below_lo = 0 if i < 0 else self._fen_prefix(i) + _lower_i(self.blocks[i], clo)
        j = self._dir_le(chi)
        upto_hi = 0 if j < 0 else self._fen_prefix(j) + _upper_i(self.blocks[j], chi)
        return upto_hi - below_lo

    def predecessor(self, key):
        """Largest stored key <= key, or None."""
        cdef int64_t k = key
        cdef Py_ssize_t i = self._dir_le(k), pos
        if i < 0:
            return None
        pos = _upper_i(self.blocks[i], k) - 1
        return self.blocks[i][pos]

    def successor(self, key):
        """Smallest stored key >= key, or None."""
        cdef int64_t k = key
        cdef Py_ssize_t i, pos
        if self.blocks.size() == 0:
            return None
        i = self._dir_le(k)
        if i < 0:
            return self.blocks[0][0]
        pos = _lower_i(self.blocks[i], k)
        if pos < <Py_ssize_t> self.blocks[i].size():
            return self.blocks[i][pos]
        if i + 1 < <Py_ssize_t> self.blocks.size():
            return self.blocks[i + 1][0]
        return None

    def load_sorted(self, keys):
        """Replace contents with an already-sorted key sequence."""
        cdef list ks = list(keys)
        cdef Py_ssize_t total = len(ks), i = 0, j, end
        cdef vector[int64_t] blk
        self.blocks.clear()
        self.mins.clear()
        self.n = total
        while i < total:
            end = i + TARGET_BLOCK
            if end > total:
                end = total
            blk.clear()
            for j in range(i, end):
                blk.push_back(ks[j])
            self.blocks.push_back(blk)
            self.mins.push_back(blk[0])
            i = end
        self._fen_rebuild()

    def audit(self):
        cdef Py_ssize_t i, j, total = 0
        cdef int64_t prev
        cdef bint have_prev = False
        for i in range(<Py_ssize_t> self.blocks.size()):
            assert self.blocks[i].size() > 0
            assert self.mins[i] == self.blocks[i][0]
            for j in range(<Py_ssize_t> self.blocks[i].size()):
                if have_prev:
                    assert prev <= self.blocks[i][j]
                prev = self.blocks[i][j]
                have_prev = True
            total += <Py_ssize_t> self.blocks[i].size()
            assert self._fen_prefix(i + 1) == total
        assert total == self.n


cdef class CountedSetF64:
    """Counted ordered multiset over double-precision float keys."""

    cdef vector[vector[double]] blocks
    cdef vector[double] mins
    cdef vector[Py_ssize_t] fen
    cdef Py_ssize_t n

    def __cinit__(self):
        self.fen.assign(1, 0)
        self.n = 0

    cdef void _fen_rebuild(self):
        cdef Py_ssize_t nb = self.blocks.size(), i, j
        self.fen.assign(nb + 1, 0)
        for i in range(1, nb + 1):
            self.fen[i] += <Py_ssize_t> self.blocks[i - 1].size()
            j = i + (i & -i)
            if j <= nb:
                self.fen[j] += self.fen[i]

    cdef void _fen_add(self, Py_ssize_t i, Py_ssize_t delta):
        cdef Py_ssize_t nb = self.fen.size() - 1
        i += 1
        while i <= nb:
            self.fen[i] += delta
            i += i & -i

    cdef Py_ssize_t _fen_prefix(self, Py_ssize_t k):
        cdef Py_ssize_t total = 0
        while k > 0:
            total += self.fen[k]
            k -= k & -k
        return total

    cdef Py_ssize_t _dir_le(self, double key):
        cdef Py_ssize_t lo = 0, hi = self.mins.size(), mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.mins[mid] <= key:
                lo = mid + 1
            else:
                hi = mid
        return lo - 1

    cdef Py_ssize_t _dir_lt(self, double key):
        cdef Py_ssize_t lo = 0, hi = self.mins.size(), mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.mins[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        return lo - 1

    def insert(self, key):
        cdef double k = key
        cdef Py_ssize_t i, pos, half
        cdef vector[double]* blk
        cdef vector[double] right
        if k != k:
            raise ValueError("NaN keys are not orderable")
        if self.blocks.size() == 0:
            right.push_back(k)
            self.blocks.push_back(right)
            self.mins.push_back(k)
            self._fen_rebuild()
            self.n = 1
            return
        i = self._dir_le(k)
        if i < 0:
            i = 0
        blk = &self.blocks[i]
        pos = _upper_f(deref(blk), k)
        blk.insert(blk.begin() + pos, k)
        if k < self.mins[i]:
            self.mins[i] = k
        self.n += 1
        if <Py_ssize_t> blk.size() >= SPLIT_AT:
            half = <Py_ssize_t> blk.size() >> 1
            right.assign(blk.begin() + half, blk.end())
            blk.resize(half)
            self.blocks.insert(self.blocks.begin() + i + 1, right)
            self.mins.insert(self.mins.begin() + i + 1, right[0])
            self._fen_rebuild()
        else:
            self._fen_add(i, 1)

    def delete(self, key):
        cdef double k = key
        cdef Py_ssize_t i, j, pos, lo, hi
        cdef vector[double]* blk
        if self.blocks.size() == 0:
            raise KeyError(key)
        i = self._dir_le(k)
        if i < 0:
            raise KeyError(key)
        blk = &self.blocks[i]
        pos = _lower_f(deref(blk), k)
        if pos == <Py_ssize_t> blk.size() or deref(blk)[pos] != k:
            raise KeyError(key)
        blk.erase(blk.begin() + pos)
        self.n -= 1
        if blk.size() == 0:
            self.blocks.erase(self.blocks.begin() + i)
            self.mins.erase(self.mins.begin() + i)
            self._fen_rebuild()
            return
        if pos == 0:
            self.mins[i] = deref(blk)[0]
        if <Py_ssize_t> blk.size() < MERGE_BELOW and self.blocks.size() > 1:
            j = i - 1 if i > 0 else i + 1
            if <Py_ssize_t> (self.blocks[j].size() + blk.size()) < SPLIT_AT:
                lo, hi = (j, i) if j < i else (i, j)
                self.blocks[lo].insert(
                    self.blocks[lo].end(),
                    self.blocks[hi].begin(),
                    self.blocks[hi].end(),
                )
                self.blocks.erase(self.blocks.begin() + hi)
                self.mins.erase(self.mins.begin() + hi)
                self._fen_rebuild()
                return
        self._fen_add(i, -1)

    def __len__(self):
        return self.n

    def __contains__(self, key):
        cdef double k = key
        cdef Py_ssize_t i, pos
        if self.blocks.size() == 0:
            return False
        i = self._dir_le(k)
        if i < 0:
            return False
        pos = _lower_f(self.blocks[i], k)
        return pos < <Py_ssize_t> self.blocks[i].size() and self.blocks[i][pos] == k

    def rank_lt(self, key):
        """Stored keys strictly below ``key``."""
        cdef double k = key
        cdef Py_ssize_t i = self._dir_lt(k)
        if i < 0:
            return 0
        return self._fen_prefix(i) + _lower_f(self.blocks[i], k)

    def rank_le(self, key):
        """Stored keys at or below ``key``."""
        cdef double k = key
        cdef Py_ssize_t i = self._dir_le(k)
        if i < 0:
            return 0
        return self._fen_prefix(i) + _upper_f(self.blocks[i], k)

    def count_range(self, lo, hi):
        """Exact number of stored keys in the closed range [lo, hi]."""
        cdef double clo = lo, chi = hi
        cdef Py_ssize_t i, j, below_lo, upto_hi
        if self.blocks.size() == 0 or clo > chi:
            return 0
        i = self._dir_lt(clo)
        below_lo = 0 if i < 0 else self._fen_prefix(i) + _lower_f(self.blocks[i], clo)
        j = self._dir_le(chi)
        upto_hi = 0 if j < 0 else self._fen_prefix(j) + _upper_f(self.blocks[j], chi)
        return upto_hi - below_lo

    def predecessor(self, key):
        """Largest stored key <= key, or None."""
        cdef double k = key
        cdef Py_ssize_t i = self._dir_le(k), pos
        if i < 0:
            return None
        pos = _upper_f(self.blocks[i], k) - 1
        return self.blocks[i][pos]

    def successor(self, key):
        """Smallest stored key >= key, or None."""
        cdef double k = key
        cdef Py_ssize_t i, pos
        if self.blocks.size() == 0:
            return None
        i = self._dir_le(k)
        if i < 0:
            return self.blocks[0][0]
        pos = _lower_f(self.blocks[i], k)
        if pos < <Py_ssize_t> self.blocks[i].size():
            return self.blocks[i][pos]
        if i + 1 < <Py_ssize_t> self.blocks.size():
            return self.blocks[i + 1][0]
        return None

    def load_sorted(self, keys):
        """Replace contents with an already-sorted key sequence."""
        cdef list ks = list(keys)
        cdef Py_ssize_t total = len(ks), i = 0, j, end
        cdef vector[double] blk
        self.blocks.clear()
        self.mins.clear()
        self.n = total
        while i < total:
            end = i + TARGET_BLOCK
            if end > total:
                end = total
            blk.clear()
            for j in range(i, end):
                blk.push_back(ks[j])
            self.blocks.push_back(blk)
            self.mins.push_back(blk[0])
            i = end
        self._fen_rebuild()

    def audit(self):
        cdef Py_ssize_t i, j, total = 0
        cdef double prev = 0.0
        cdef bint have_prev = False
        for i in range(<Py_ssize_t> self.blocks.size()):
            assert self.blocks[i].size() > 0
            assert self.mins[i] == self.blocks[i][0]
            for j in range(<Py_ssize_t> self.blocks[i].size()):
                if have_prev:
                    assert prev <= self.blocks[i][j]
                prev = self.blocks[i][j]
                have_prev = True
            total += <Py_ssize_t> self.blocks[i].size()
            assert self._fen_prefix(i + 1) == total
        assert total == self.n
