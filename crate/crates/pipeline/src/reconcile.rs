use recomb_core::model::fold_text;
use recomb_core::prompt::LayoutEntry;
use recomb_core::LayoutSlot;

/// Assigns one answered box to each object, in object order. An object
/// takes the first unused entry with the same name, else the first whose
/// name contains or is contained in its own, else the first unused entry
/// left over. Extra entries are dropped. `None` when there are fewer
/// entries than objects.
///
/// Slots carry the draft's object names, not the model's spelling.
pub fn reconcile_layout(objects: &[String], entries: &[LayoutEntry]) -> Option<Vec<LayoutSlot>> {
    if entries.len() < objects.len() {
        return None;
    }
    let folded: Vec<String> = entries.iter().map(|e| fold_text(&e.name)).collect();
    let mut used = vec![false; entries.len()];
    let mut chosen: Vec<Option<usize>> = vec![None; objects.len()];

    let passes: [&dyn Fn(&str, &str) -> bool; 2] = [
        &|a, b| a == b,
        &|a, b| !a.is_empty() && !b.is_empty() && (a.contains(b) || b.contains(a)),
    ];
    for matches in passes {
        for (i, name) in objects.iter().enumerate() {
            if chosen[i].is_some() {
                continue;
            }
            let name = fold_text(name);
            if let Some(j) = (0..entries.len()).find(|&j| !used[j] && matches(&name, &folded[j])) {
                used[j] = true;
                chosen[i] = Some(j);
            }
        }
    }
    for slot in chosen.iter_mut().filter(|c| c.is_none()) {
        let j = used.iter().position(|u| !u)?;
        used[j] = true;
        *slot = Some(j);
    }

    Some(
        objects
            .iter()
            .zip(chosen)
            .map(|(name, j)| LayoutSlot {
                object_name: name.clone(),
                bbox: entries[j.expect("every object was assigned")].bbox,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use recomb_core::BBox;

    fn entry(name: &str, x: f64) -> LayoutEntry {
        LayoutEntry {
            name: name.into(),
            bbox: BBox::new(x, 0.0, 0.1, 0.1),
            clamped: false,
            pixel_input: false,
        }
    }

    fn xs(slots: &[LayoutSlot]) -> Vec<f64> {
        slots.iter().map(|s| s.bbox.x).collect()
    }

    #[test]
    fn exact_names_win_over_order() {
        let objects = ["apple", "apple", "wooden table"].map(String::from);
        let entries = [entry("wooden table", 0.0), entry("apple", 0.2), entry("apple", 0.4)];
        let slots = reconcile_layout(&objects, &entries).unwrap();
        assert_eq!(xs(&slots), [0.2, 0.4, 0.0]);
        assert_eq!(slots[2].object_name, "wooden table");
    }

    #[test]
    fn containment_and_leftovers() {
        let objects = ["air balloon", "Dog", "vet"].map(String::from);
        let entries = [entry("cat", 0.0), entry("dog", 0.2), entry("balloon", 0.4), entry("x", 0.6)];
        let slots = reconcile_layout(&objects, &entries).unwrap();
        assert_eq!(xs(&slots), [0.4, 0.2, 0.0]);
        let names: Vec<&str> = slots.iter().map(|s| s.object_name.as_str()).collect();
        assert_eq!(names, ["air balloon", "Dog", "vet"]);
    }

    #[test]
    fn too_few_entries() {
        let objects = ["a", "b"].map(String::from);
        assert!(reconcile_layout(&objects, &[entry("a", 0.0)]).is_none());
    }
}
