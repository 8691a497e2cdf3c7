//! Row kernels `dst += f * src` specialised per field family.

use crate::gf::{Elem, FiniteField};

#[inline]
fn axpy_mod<const P: u32>(dst: &mut [Elem], f: Elem, src: &[Elem]) {
    let f = f as u32;
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = ((*d as u32 + f * s as u32) % P) as Elem;
    }
}

pub(crate) fn axpy(field: &FiniteField, dst: &mut [Elem], f: Elem, src: &[Elem]) {
    debug_assert_eq!(dst.len(), src.len());
    if f == 0 {
        return;
    }
    let p = field.characteristic();
    if field.is_prime_field() {
        match p {
            2 => {
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
            3 => axpy_mod::<3>(dst, f, src),
            5 => axpy_mod::<5>(dst, f, src),
            7 => axpy_mod::<7>(dst, f, src),
            11 => axpy_mod::<11>(dst, f, src),
            13 => axpy_mod::<13>(dst, f, src),
            _ => {
                let f = f as u64;
                let p = p as u64;
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = ((*d as u64 + f * s as u64) % p) as Elem;
                }
            }
        }
    } else if p == 2 {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d ^= field.mul(f, s);
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = field.add(*d, field.mul(f, s));
        }
    }
}

pub(crate) fn scale(field: &FiniteField, row: &mut [Elem], f: Elem) {
    if f == 1 {
        return;
    }
    for a in row.iter_mut() {
        *a = field.mul(f, *a);
    }
}
