use super::Caps;
use crate::error::Result;
use crate::finab::{FinAbGroup, GroupElem, GroupHom};
use crate::orthogroup::OrthElem;

/// Every element of `O(A ⊕ A*)`, sorted.
///
/// `M` is determined by the images of the generators `(g_j, 0)` and
/// `(0, g_j)`. Each image must be killed by the order of its generator and
/// be isotropic, and the images must pair with each other as the generators
/// do. That already makes `q ∘ M = q`, and `M` is injective because the
/// polar form is non-degenerate, so no bijectivity scan is needed. The
/// search backtracks over generator images.
pub fn enumerate_orthogonal_group(a: &FinAbGroup, caps: &Caps) -> Result<Vec<OrthElem>> {
    let n = a.order();
    caps.check(
        "|A|^2 for orthogonal-group enumeration",
        n.saturating_mul(n),
        caps.pair_space,
    )?;
    let r = a.rank();
    let els: Vec<GroupElem> = a.elements().collect();
    let space: Vec<(GroupElem, GroupElem)> = els
        .iter()
        .flat_map(|x| els.iter().map(move |f| (x.clone(), f.clone())))
        .collect();
    let gens: Vec<(GroupElem, GroupElem)> = (0..2 * r)
        .map(|j| {
            if j < r {
                (a.generator(j), a.identity())
            } else {
                (a.identity(), a.generator(j - r))
            }
        })
        .collect();
    let polar = |u: &(GroupElem, GroupElem), v: &(GroupElem, GroupElem)| {
        (a.pair(&u.1, &v.0) + a.pair(&v.1, &u.0)) % a.exponent()
    };
    // Candidates per generator: right order and isotropic.
    let candidates: Vec<Vec<usize>> = (0..2 * r)
        .map(|j| {
            let ord = a.cyclics()[j % r].order as i64;
            (0..space.len())
                .filter(|&k| {
                    let (x, f) = &space[k];
                    a.scale(ord, x) == a.identity()
                        && a.scale(ord, f) == a.identity()
                        && a.pair(f, x) == 0
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(2 * r);
    let mut cursor = vec![0usize; 2 * r];
    loop {
        let depth = chosen.len();
        if depth == 2 * r {
            caps.check(
                "orthogonal-group elements",
                out.len() as u64 + 1,
                caps.elements,
            )?;
            out.push(assemble(a, &space, &chosen)?);
        } else if cursor[depth] < candidates[depth].len() {
            let k = candidates[depth][cursor[depth]];
            cursor[depth] += 1;
            let fits = chosen
                .iter()
                .enumerate()
                .all(|(i, &c)| polar(&space[c], &space[k]) == polar(&gens[i], &gens[depth]));
            if fits {
                chosen.push(k);
                if chosen.len() < 2 * r {
                    cursor[chosen.len()] = 0;
                }
            }
            continue;
        }
        // Exhausted this level (or emitted a leaf): step back.
        if chosen.pop().is_none() {
            break;
        }
    }
    out.sort();
    Ok(out)
}

/// Blocks from generator images: column `j` of `α`/`γ` is the image of
/// `(g_j, 0)`, column `j` of `β`/`δ` the image of `(0, g_j)`.
fn assemble(
    a: &FinAbGroup,
    space: &[(GroupElem, GroupElem)],
    chosen: &[usize],
) -> Result<OrthElem> {
    let r = a.rank();
    let block = |offset: usize, part: fn(&(GroupElem, GroupElem)) -> &GroupElem| {
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| part(&space[chosen[offset + j]]).0[i])
                    .collect()
            })
            .collect();
        GroupHom::new(a.clone(), a.clone(), entries)
    };
    OrthElem::new(
        block(0, |v| &v.0)?,
        block(r, |v| &v.0)?,
        block(0, |v| &v.1)?,
        block(r, |v| &v.1)?,
    )
}
