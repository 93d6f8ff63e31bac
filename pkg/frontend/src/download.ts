// The OCEL download must hand the service bytes to the browser unchanged,
// so the blob is built straight from the fetched buffer.
export function bytesToBlob(bytes: Uint8Array, type = "application/json"): Blob {
  return new Blob([bytes as BlobPart], { type });
}

export function textToBlob(text: string, type = "text/csv"): Blob {
  return new Blob([text], { type });
}

export function saveBlob(blob: Blob, filename: string): void {
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
