//! Annotation session state: items, their current edge maps, journals and
//! export.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock, TryLockError};

use depthedge::extract::gt_from_panoptic;
use depthedge::metrics::ManifestRecord;
use depthedge::{io, DepthMap, EdgeMap};
use serde::{Deserialize, Serialize};

use crate::edit::{EdgeEdit, Pixel};
use crate::error::{AnnotateError, Result};
use crate::journal::{Journal, JournalEntry};

/// Directory under the dataset root holding journals and snapshots.
pub const STATE_DIR: &str = ".annotation";
/// A PNG snapshot of the edge map is written every this many edits.
pub const SNAPSHOT_EVERY: u64 = 16;
/// Depth difference the annotation guideline treats as a depth edge.
pub const DEPTH_EDGE_METERS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Todo,
    InProgress,
    Done,
}

/// Where initial edges come from when an item offers both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalSource {
    #[default]
    Panoptic,
    EdgeMapFiles,
}

/// Where an item's initial edges actually came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Panoptic,
    EdgeMapFile,
    /// No proposal available; starts from an empty map sized by the depth.
    Empty,
}

/// One entry of `manifest.json` in the dataset root. Paths are relative to
/// the root unless absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemEntry {
    pub id: String,
    pub rgb_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panoptic_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SessionManifest {
    #[serde(default)]
    pub items: Vec<ItemEntry>,
    /// Class pairs whose shared boundaries are not edges.
    #[serde(default)]
    pub excluded_class_pairs: Vec<(u32, u32)>,
}

/// Immutable view of an item at one journal position.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSnapshot {
    pub edges: EdgeMap,
    pub status: Status,
    /// Number of journal entries applied.
    pub seq: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemSummary {
    pub id: String,
    pub status: Status,
    pub provenance: Provenance,
    pub height: usize,
    pub width: usize,
    pub has_depth: bool,
    pub num_edges: usize,
    pub seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResult {
    pub d1: f64,
    pub d2: f64,
    pub diff: f64,
    pub exceeds_4m: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExportSummary {
    pub out_dir: PathBuf,
    pub manifest_path: PathBuf,
    pub ids: Vec<String>,
}

#[derive(Debug)]
struct Item {
    entry: ItemEntry,
    provenance: Provenance,
    depth: Option<DepthMap>,
    initial: EdgeMap,
    current: RwLock<Arc<ItemSnapshot>>,
    writer: Mutex<Journal>,
}

#[derive(Debug)]
pub struct Session {
    root: PathBuf,
    items: Vec<Item>,
    index: HashMap<String, usize>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

fn step(snap: &ItemSnapshot, entry: &JournalEntry) -> Result<ItemSnapshot> {
    let mut next = snap.clone();
    match entry {
        JournalEntry::Edit { edit, .. } => {
            edit.apply(&mut next.edges)?;
            if next.status == Status::Todo {
                next.status = Status::InProgress;
            }
        }
        JournalEntry::Status { status, .. } => next.status = *status,
    }
    next.seq += 1;
    Ok(next)
}

/// Replays journal entries on top of the initial edges.
pub fn replay(initial: &EdgeMap, entries: &[JournalEntry]) -> Result<ItemSnapshot> {
    let mut snap = ItemSnapshot {
        edges: initial.clone(),
        status: Status::Todo,
        seq: 0,
    };
    for e in entries {
        snap = step(&snap, e)?;
    }
    Ok(snap)
}

fn write_snapshot(path: &Path, edges: &EdgeMap) -> Result<()> {
    let tmp = path.with_extension("png.tmp");
    io::save_edges(&tmp, edges)?;
    std::fs::rename(&tmp, path).map_err(|e| depthedge::Error::io(path, e))?;
    Ok(())
}

impl Session {
    /// Opens the dataset at `root`: reads `root/manifest.json`, builds the
    /// initial edges of every item and replays any existing journals.
    pub fn init(root: &Path, source: ProposalSource) -> Result<Session> {
        let manifest_path = root.join("manifest.json");
        let text = std::fs::read_to_string(&manifest_path)
            .map_err(|e| AnnotateError::Manifest(format!("{}: {e}", manifest_path.display())))?;
        let manifest: SessionManifest = serde_json::from_str(&text)
            .map_err(|e| AnnotateError::Manifest(format!("{}: {e}", manifest_path.display())))?;
        let state = root.join(STATE_DIR);
        std::fs::create_dir_all(&state).map_err(|e| depthedge::Error::io(&state, e))?;

        let mut items = Vec::with_capacity(manifest.items.len());
        let mut index = HashMap::new();
        for entry in manifest.items {
            if !valid_id(&entry.id) {
                return Err(AnnotateError::Manifest(format!("invalid item id {:?}", entry.id)));
            }
            if index.insert(entry.id.clone(), items.len()).is_some() {
                return Err(AnnotateError::Manifest(format!("duplicate item id {:?}", entry.id)));
            }
            items.push(Self::load_item(root, &state, entry, source, &manifest.excluded_class_pairs)?);
        }
        Ok(Session {
            root: root.to_path_buf(),
            items,
            index,
        })
    }

    fn load_item(
        root: &Path,
        state: &Path,
        entry: ItemEntry,
        source: ProposalSource,
        excluded: &[(u32, u32)],
    ) -> Result<Item> {
        let resolve = |p: &Path| root.join(p);
        let depth = entry.depth_path.as_deref().map(|p| io::load_depth(&resolve(p))).transpose()?;
        let from_panoptic = |p: &Path| -> Result<EdgeMap> {
            Ok(gt_from_panoptic(&io::load_panoptic(&resolve(p), excluded)?))
        };
        let from_file = |p: &Path| -> Result<EdgeMap> { Ok(io::load_edges(&resolve(p))?) };
        let (initial, provenance) = match (source, &entry.panoptic_path, &entry.edges_path) {
            (ProposalSource::Panoptic, Some(p), _) | (ProposalSource::EdgeMapFiles, Some(p), None) => {
                (from_panoptic(p)?, Provenance::Panoptic)
            }
            (_, _, Some(p)) => (from_file(p)?, Provenance::EdgeMapFile),
            (_, None, None) => match &depth {
                Some(d) => (EdgeMap::empty(d.height(), d.width()), Provenance::Empty),
                None => {
                    return Err(AnnotateError::Manifest(format!(
                        "item {:?} has neither a proposal nor depth to size its frame",
                        entry.id
                    )))
                }
            },
        };
        if let Some(d) = &depth {
            if d.dims() != initial.dims() {
                return Err(AnnotateError::Manifest(format!(
                    "item {:?}: depth is {:?} but edges are {:?}",
                    entry.id,
                    d.dims(),
                    initial.dims()
                )));
            }
        }
        let (journal, entries) = Journal::open(&state.join(format!("{}.jsonl", entry.id)))?;
        let snap = replay(&initial, &entries)?;
        if !entries.is_empty() {
            write_snapshot(&state.join(format!("{}.png", entry.id)), &snap.edges)?;
        }
        Ok(Item {
            entry,
            provenance,
            depth,
            initial,
            current: RwLock::new(Arc::new(snap)),
            writer: Mutex::new(journal),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn item(&self, id: &str) -> Result<&Item> {
        self.index
            .get(id)
            .map(|&i| &self.items[i])
            .ok_or_else(|| AnnotateError::UnknownItem(id.to_string()))
    }

    fn load_snapshot(item: &Item) -> Arc<ItemSnapshot> {
        Arc::clone(&item.current.read().unwrap_or_else(|p| p.into_inner()))
    }

    pub fn snapshot(&self, id: &str) -> Result<Arc<ItemSnapshot>> {
        Ok(Self::load_snapshot(self.item(id)?))
    }

    pub fn provenance(&self, id: &str) -> Result<Provenance> {
        Ok(self.item(id)?.provenance)
    }

    pub fn initial_edges(&self, id: &str) -> Result<&EdgeMap> {
        Ok(&self.item(id)?.initial)
    }

    pub fn entry(&self, id: &str) -> Result<&ItemEntry> {
        Ok(&self.item(id)?.entry)
    }

    pub fn summary(&self, id: &str) -> Result<ItemSummary> {
        let item = self.item(id)?;
        let snap = Self::load_snapshot(item);
        Ok(ItemSummary {
            id: item.entry.id.clone(),
            status: snap.status,
            provenance: item.provenance,
            height: snap.edges.height(),
            width: snap.edges.width(),
            has_depth: item.depth.is_some(),
            num_edges: snap.edges.len(),
            seq: snap.seq,
        })
    }

    pub fn summaries(&self) -> Vec<ItemSummary> {
        self.items
            .iter()
            .map(|i| self.summary(&i.entry.id).expect("indexed item"))
            .collect()
    }

    /// Claims the single writer slot of an item, failing with
    /// [`AnnotateError::Conflict`] while another writer holds it.
    pub fn writer(&self, id: &str) -> Result<WriteGuard<'_>> {
        let item = self.item(id)?;
        let journal = match item.writer.try_lock() {
            Ok(g) => g,
            Err(TryLockError::WouldBlock) => return Err(AnnotateError::Conflict(id.to_string())),
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        Ok(WriteGuard {
            item,
            journal,
            state_dir: self.root.join(STATE_DIR),
        })
    }

    pub fn apply_edit(&self, id: &str, edit: EdgeEdit) -> Result<Arc<ItemSnapshot>> {
        self.writer(id)?.apply(edit)
    }

    pub fn set_status(&self, id: &str, status: Status) -> Result<Arc<ItemSnapshot>> {
        self.writer(id)?.set_status(status)
    }

    /// Depths at two pixels and whether they differ by at least 4 m.
    pub fn depth_probe(&self, id: &str, p1: Pixel, p2: Pixel) -> Result<ProbeResult> {
        let item = self.item(id)?;
        let depth = item.depth.as_ref().ok_or_else(|| AnnotateError::NoDepth(id.to_string()))?;
        let at = |p: Pixel| {
            if p.0 >= depth.height() || p.1 >= depth.width() {
                return Err(AnnotateError::InvalidProbe(format!("pixel {p:?} outside the frame")));
            }
            depth
                .get(p.0, p.1)
                .ok_or_else(|| AnnotateError::InvalidProbe(format!("no valid depth at {p:?}")))
        };
        let (d1, d2) = (at(p1)?, at(p2)?);
        let diff = (d1 - d2).abs();
        Ok(ProbeResult {
            d1,
            d2,
            diff,
            exceeds_4m: diff >= DEPTH_EDGE_METERS,
        })
    }

    pub fn depth(&self, id: &str) -> Result<&DepthMap> {
        let item = self.item(id)?;
        item.depth.as_ref().ok_or_else(|| AnnotateError::NoDepth(id.to_string()))
    }

    pub fn rgb_path(&self, id: &str) -> Result<PathBuf> {
        Ok(self.root.join(&self.item(id)?.entry.rgb_path))
    }

    /// Writes every done item's edges as `out_dir/<id>.png` plus an
    /// evaluation manifest `out_dir/manifest.json`.
    pub fn export(&self, out_dir: &Path) -> Result<ExportSummary> {
        let done: Vec<(&Item, Arc<ItemSnapshot>)> = self
            .items
            .iter()
            .map(|i| (i, Self::load_snapshot(i)))
            .filter(|(_, s)| s.status == Status::Done)
            .collect();
        if done.is_empty() {
            return Err(AnnotateError::NothingToExport);
        }
        let mut records = Vec::with_capacity(done.len());
        for (item, snap) in &done {
            let name = format!("{}.png", item.entry.id);
            io::save_edges(&out_dir.join(&name), &snap.edges)?;
            records.push(ManifestRecord {
                id: item.entry.id.clone(),
                pred_depth_path: None,
                gt_depth_path: None,
                gt_edges_path: PathBuf::from(name),
            });
        }
        let manifest_path = out_dir.join("manifest.json");
        let text = depthedge::json::to_canonical_json(&records)?;
        io::write_file(&manifest_path, text.as_bytes())?;
        Ok(ExportSummary {
            out_dir: out_dir.to_path_buf(),
            manifest_path,
            ids: records.into_iter().map(|r| r.id).collect(),
        })
    }
}

/// Exclusive write access to one item.
pub struct WriteGuard<'a> {
    item: &'a Item,
    journal: MutexGuard<'a, Journal>,
    state_dir: PathBuf,
}

impl WriteGuard<'_> {
    fn commit(&mut self, make: impl FnOnce(u64) -> JournalEntry) -> Result<Arc<ItemSnapshot>> {
        let cur = Session::load_snapshot(self.item);
        let entry = make(self.journal.next_seq());
        // validate before anything reaches the journal
        let next = step(&cur, &entry)?;
        self.journal.append(&entry)?;
        let is_edit = matches!(entry, JournalEntry::Edit { .. });
        if next.status == Status::Done || (is_edit && next.seq % SNAPSHOT_EVERY == 0) {
            write_snapshot(&self.state_dir.join(format!("{}.png", self.item.entry.id)), &next.edges)?;
        }
        let next = Arc::new(next);
        *self.item.current.write().unwrap_or_else(|p| p.into_inner()) = Arc::clone(&next);
        Ok(next)
    }

    pub fn apply(&mut self, edit: EdgeEdit) -> Result<Arc<ItemSnapshot>> {
        self.commit(|seq| JournalEntry::Edit { seq, edit })
    }

    pub fn set_status(&mut self, status: Status) -> Result<Arc<ItemSnapshot>> {
        self.commit(|seq| JournalEntry::Status { seq, status })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_file_safe() {
        assert!(valid_id("0001_a.b-c"));
        assert!(!valid_id(""));
        assert!(!valid_id(".hidden"));
        assert!(!valid_id("a/b"));
        assert!(!valid_id("a b"));
    }

    #[test]
    fn replay_tracks_status() {
        let init = EdgeMap::empty(3, 3);
        let entries = vec![
            JournalEntry::Edit {
                seq: 0,
                edit: EdgeEdit::AddPolyline { points: vec![(0, 0), (0, 2)] },
            },
            JournalEntry::Status { seq: 1, status: Status::Done },
        ];
        let s = replay(&init, &entries[..1]).unwrap();
        assert_eq!((s.status, s.edges.len(), s.seq), (Status::InProgress, 3, 1));
        let s = replay(&init, &entries).unwrap();
        assert_eq!((s.status, s.seq), (Status::Done, 2));
    }
}
